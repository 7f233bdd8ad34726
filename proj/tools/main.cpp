#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "sarmot/core.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Line-feature enhanced multi-object tracking toolkit"};
  app.require_subcommand(1);
  sarmot::cli::register_commands(app, std::cout);
  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const sarmot::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
