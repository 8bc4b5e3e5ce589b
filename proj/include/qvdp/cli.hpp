#pragma once

// Command-line front end: option resolution (flag > config file > default),
// command dispatch and CSV/JSON result files.

#include <iosfwd>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace qvdp::cli {

/// Exit codes of run().
inline constexpr int kExitOk = 0;
inline constexpr int kExitComputation = 1;
inline constexpr int kExitUsage = 2;

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "QVDP_OUTPUT_DIR";

using Cell = std::variant<double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

enum class Format { csv, json };

struct ResultEnvelope {
  /// Fully resolved configuration as JSON text; valid input for --config.
  std::string config_json;
  std::string version;
  /// Wall time per phase in seconds.
  std::map<std::string, double> timings;
  Table payload;
};

/// "%.17g" formatting used for every number written by the CLI.
std::string format_number(double v);

/// CSV: header row then one line per row, ',' delimiter, '\n' line ends.
std::string to_csv(const Table& table);
/// JSON: {"config": ..., "version": ..., "timings": ..., "rows": [...]}.
std::string to_json(const ResultEnvelope& envelope);

/// Writes the envelope to `path`. Throws qvdp::Error with the path on I/O failure.
void emit(const ResultEnvelope& envelope, Format format, const std::string& path);

/// Runs one command. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// argv entry point.
int main(int argc, char** argv);

}  // namespace qvdp::cli
