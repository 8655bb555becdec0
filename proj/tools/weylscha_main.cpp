#include <iostream>

#include "weylscha/cli.hpp"

int main(int argc, char** argv) {
  try {
    const auto cfg = weylscha::cli::parse_config(argc, argv);
    return weylscha::cli::run(cfg, std::cout);
  } catch (const weylscha::ConfigError& e) {
    const std::string msg = e.what();
    if (msg.rfind("help\n", 0) == 0) {
      std::cout << msg.substr(5);
      return 0;
    }
    std::cerr << msg << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
