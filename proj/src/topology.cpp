#include "sentinel/topology.hpp"

#include <algorithm>

namespace sentinel::sim {

std::pair<NodeId, NodeId> Topology::key(NodeId a, NodeId b) {
    return {std::min(a, b), std::max(a, b)};
}

void Topology::add_node(NodeSpec spec) {
    if (spec.id == kBroadcastId) {
        throw std::invalid_argument("node id 0xFFFF is reserved for broadcast");
    }
    if (has_node(spec.id)) {
        throw std::invalid_argument("duplicate node id " + std::to_string(spec.id));
    }
    if (spec.weight < 0.0) {
        throw std::invalid_argument("node weight must be >= 0");
    }
    nodes_.push_back(std::move(spec));
}

void Topology::add_link(NodeId a, NodeId b, LinkModel link) {
    if (a == b) {
        throw std::invalid_argument("self-links are not allowed");
    }
    if (!has_node(a) || !has_node(b)) {
        throw std::invalid_argument("link references unknown node");
    }
    if (link.loss_prob < 0.0 || link.loss_prob > 1.0) {
        throw std::invalid_argument("loss_prob must be within [0, 1]");
    }
    if (link.latency_ms == 0) {
        throw std::invalid_argument("latency_ms must be > 0");
    }
    links_[key(a, b)] = link;
}

Topology Topology::full_mesh(const std::vector<NodeSpec>& nodes, LinkModel link) {
    Topology t;
    for (const auto& n : nodes) {
        t.add_node(n);
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (std::size_t j = i + 1; j < nodes.size(); ++j) {
            t.add_link(nodes[i].id, nodes[j].id, link);
        }
    }
    return t;
}

bool Topology::has_node(NodeId id) const {
    return std::any_of(nodes_.begin(), nodes_.end(),
                       [&](const NodeSpec& n) { return n.id == id; });
}

const NodeSpec& Topology::node(NodeId id) const {
    for (const auto& n : nodes_) {
        if (n.id == id) {
            return n;
        }
    }
    throw std::invalid_argument("unknown node " + std::to_string(id));
}

bool Topology::has_link(NodeId a, NodeId b) const {
    return links_.count(key(a, b)) != 0;
}

const LinkModel& Topology::link(NodeId a, NodeId b) const {
    auto it = links_.find(key(a, b));
    if (it == links_.end()) {
        throw NoLink("no link between " + std::to_string(a) + " and " + std::to_string(b));
    }
    return it->second;
}

std::vector<NodeId> Topology::neighbors_of(NodeId id) const {
    std::vector<NodeId> out;
    for (const auto& [pair, link] : links_) {
        if (pair.first == id) {
            out.push_back(pair.second);
        } else if (pair.second == id) {
            out.push_back(pair.first);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::map<NodeId, double> Topology::neighbor_weights_of(NodeId id) const {
    std::map<NodeId, double> out;
    for (NodeId n : neighbors_of(id)) {
        out[n] = node(n).weight;
    }
    return out;
}

void Topology::set_link_loss(NodeId a, NodeId b, double loss_prob) {
    auto it = links_.find(key(a, b));
    if (it == links_.end()) {
        throw NoLink("no link between " + std::to_string(a) + " and " + std::to_string(b));
    }
    it->second.loss_prob = loss_prob;
}

}  // namespace sentinel::sim
