// stratalab: verification suites for the lattice-level Bruhat-Tits
// stratifications of the quaternionic unitary and paramodular moduli spaces
// at desk scale over small primes.
//
//   stratalab <suite> --p <prime> --deg <d> --radius <r>
//             [--precision <m>] [--out <path>] [--format json|text]
//
// suites: dl-partition | dl-components | building-ball | rz-quaternionic
//         | rz-paramodular | weyl-eo | all
//
// Exit status is nonzero iff some check fails.

#include "stratalab/report.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"lattice-level Bruhat-Tits stratification checks"};
  stratalab::SuiteConfig cfg;
  std::string out_path;
  std::string format = "text";

  app.add_option("suite", cfg.suite,
                 "dl-partition | dl-components | building-ball | rz-quaternionic | "
                 "rz-paramodular | weyl-eo | all")
      ->required();
  app.add_option("--p", cfg.p, "odd prime (3 or 5)")->capture_default_str();
  app.add_option("--deg", cfg.d, "rationality degree (1, 2 or 4)")->capture_default_str();
  app.add_option("--radius", cfg.radius, "lattice ball radius (at most 2)")
      ->capture_default_str();
  app.add_option("--precision", cfg.precision,
                 "Witt precision exponent (default 2 * radius + 4)");
  app.add_option("--threads", cfg.threads, "worker threads (0 = hardware)");
  app.add_option("--out", out_path, "output path (default: stdout)");
  app.add_option("--format", format, "json | text")->capture_default_str();
  app.add_flag("--timing", cfg.timing, "include elapsed milliseconds in the report");

  CLI11_PARSE(app, argc, argv);

  try {
    cfg.validate();
    if (format != "json" && format != "text")
      throw std::invalid_argument("unknown format " + format);
    stratalab::SuiteReport rep = stratalab::run_suite(cfg);
    std::string doc = stratalab::emit_report(rep, format);
    if (out_path.empty()) {
      std::cout << doc;
    } else {
      std::ofstream f(out_path, std::ios::binary);
      if (!f) {
        std::cerr << "cannot open " << out_path << "\n";
        return 2;
      }
      f << doc;
    }
    return rep.ok() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
