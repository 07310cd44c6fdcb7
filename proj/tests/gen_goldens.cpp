// Regenerates the frozen preset documents under tests/golden/.
#include <filesystem>
#include <fstream>
#include <iostream>

#include "sentinel/presets.hpp"

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: gen_goldens <output-dir>\n";
        return 1;
    }
    const std::filesystem::path dir(argv[1]);
    std::filesystem::create_directories(dir);
    for (const auto& name : sentinel::cli::presets::sim_preset_names()) {
        const auto doc = sentinel::cli::presets::sim_preset(name);
        std::ofstream out(dir / (name + ".json"));
        out << doc->dump(2) << "\n";
        std::cout << "wrote " << (dir / (name + ".json")) << "\n";
    }
    return 0;
}
