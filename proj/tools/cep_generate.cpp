#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "cep/io.hpp"
#include "cep/synthetic.hpp"

int main(int argc, char** argv) {
  cep::SyntheticOptions options;
  std::uint64_t seed = 1;
  std::filesystem::path out = "instance";
  bool no_batteries = false, no_hydro = false;

  CLI::App app{"Writes a random instance and scenario set"};
  app.add_option("--seed", seed)->capture_default_str();
  app.add_option("--zones", options.zones)->capture_default_str();
  app.add_option("--scenarios", options.scenarios)->capture_default_str();
  app.add_option("--blocks", options.blocks)->capture_default_str();
  app.add_option("--eens-fraction", options.eens_fraction)->capture_default_str();
  app.add_option("--asymmetry", options.asymmetry)->capture_default_str();
  app.add_flag("--no-batteries", no_batteries);
  app.add_flag("--no-hydro", no_hydro);
  app.add_option("--out", out, "Output directory")->capture_default_str();
  CLI11_PARSE(app, argc, argv);
  options.batteries = !no_batteries;
  options.hydro = !no_hydro;

  try {
    const auto [instance, scenarios] = cep::generate_instance(seed, options);
    std::filesystem::create_directories(out);
    cep::write_instance(out / "instance.json", instance);
    cep::write_scenarios(out, instance, scenarios);
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
  return 0;
}
