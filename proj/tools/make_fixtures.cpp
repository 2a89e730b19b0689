// Regenerates the bundled dataset fixtures into the given directory.
#include <iostream>
#include <string>

#include "fairgap/fixtures.hpp"

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: make_fixtures <output-dir>\n";
        return 2;
    }
    const std::string dir = argv[1];
    constexpr std::uint64_t kSeed = 42;
    fairgap::data::write_compas_fixture(dir + "/compas.csv", kSeed);
    fairgap::data::write_nels_fixture(dir + "/nels.csv", kSeed);
    fairgap::data::write_compas_baseline_predictions(dir + "/compas.csv",
                                                     dir + "/compas_baseline_preds.txt", kSeed);
    std::cout << "fixtures written to " << dir << '\n';
    return 0;
}
