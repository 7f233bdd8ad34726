#pragma once

#include <iosfwd>

namespace CLI {
class App;
}

namespace sarmot::cli {

/// Registers every subcommand on `app`; the selected one runs from its callback.
void register_commands(CLI::App& app, std::ostream& out);

}  // namespace sarmot::cli
