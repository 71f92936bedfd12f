// Writes a small clustered fixture dataset for trying out pat-align.
#include <iostream>

#include <CLI11.hpp>

#include "pat/error.hpp"
#include "pat/synthetic.hpp"

int main(int argc, char** argv) {
    pat::SyntheticSpec spec;
    std::string root;
    bool multi = false;
    CLI::App app{"Generate a synthetic pat-align dataset"};
    app.add_option("root", root, "Output directory")->required();
    app.add_option("--samples", spec.samples);
    app.add_option("--classes", spec.classes);
    app.add_option("--prompts", spec.prompts);
    app.add_option("--dim", spec.dim);
    app.add_option("--frames", spec.frames);
    app.add_option("--frame-noise", spec.frame_noise);
    app.add_option("--prompt-noise", spec.prompt_noise);
    app.add_option("--seed", spec.seed);
    app.add_flag("--multi-label", multi);
    CLI11_PARSE(app, argc, argv);
    if (multi) spec.task = pat::TaskType::MultiLabel;
    try {
        pat::write_synthetic(pat::make_synthetic(spec), root);
    } catch (const pat::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
