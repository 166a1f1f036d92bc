#include <iostream>

#include "CLI11.hpp"
#include "app.h"

int main(int argc, char** argv) {
    CLI::App cli{"HTTP service for natural-language spatio-temporal queries"};
    nlstplan::app::ServeOptions so;
    cli.add_option("--data", so.data, "Dataset root directory (NLSTPLAN_DATA overrides)");
    cli.add_option("--model", so.model, "Classifier model file");
    cli.add_option("--port", so.port, "Port");
    cli.add_option("--host", so.host, "Listen address");
    cli.add_option("--seed", so.seed, "Seed");
    cli.add_option("--static", so.static_dir, "Web console assets directory");
    CLI11_PARSE(cli, argc, argv);
    try {
        return nlstplan::app::serve(so);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
}
