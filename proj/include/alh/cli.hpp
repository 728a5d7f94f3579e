#ifndef ALH_CLI_HPP
#define ALH_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace alh {

enum ExitCode { kOk = 0, kUsage = 1, kNumerical = 2, kIdentity = 3 };

// Runs the alh-lab front end; args excludes the program name. The artifact goes
// to out (or to --output, written atomically), diagnostics to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Flattens a JSON document to "path,value" rows with a header.
std::string json_to_csv(const std::string& json_text);

// Writes through a temporary file in the same directory and renames it into place.
void write_atomically(const std::string& path, const std::string& content);

} // namespace alh

#endif
