#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sentinel/types.hpp"

namespace sentinel::sim {

struct LinkModel {
    double loss_prob = 0.0;
    SimTime latency_ms = 2;
};

struct NodeSpec {
    NodeId id = 0;
    std::string room;
    double weight = 1.0;
};

struct NoLink : std::logic_error {
    using std::logic_error::logic_error;
};

// Single-hop topology: nodes plus symmetric point-to-point links. Neighbor
// sets derive from the links, so a node can only ever address peers it has
// a direct link to.
class Topology {
  public:
    void add_node(NodeSpec spec);
    // Stores one undirected link; throws on self-links or unknown nodes.
    void add_link(NodeId a, NodeId b, LinkModel link);

    static Topology full_mesh(const std::vector<NodeSpec>& nodes, LinkModel link);

    const std::vector<NodeSpec>& nodes() const { return nodes_; }
    const NodeSpec& node(NodeId id) const;
    bool has_node(NodeId id) const;
    bool has_link(NodeId a, NodeId b) const;
    const LinkModel& link(NodeId a, NodeId b) const;  // throws NoLink
    std::vector<NodeId> neighbors_of(NodeId id) const;
    std::map<NodeId, double> neighbor_weights_of(NodeId id) const;

    void set_link_loss(NodeId a, NodeId b, double loss_prob);

  private:
    static std::pair<NodeId, NodeId> key(NodeId a, NodeId b);

    std::vector<NodeSpec> nodes_;
    std::map<std::pair<NodeId, NodeId>, LinkModel> links_;
};

}  // namespace sentinel::sim
