#pragma once

#include <cstddef>
#include <filesystem>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace plab::cli {

inline constexpr const char* kVersion = "0.1.0";

// exit statuses
inline constexpr int kExitOk = 0;
inline constexpr int kExitParse = 2;
inline constexpr int kExitPrecondition = 3;
inline constexpr int kExitBudget = 4;
inline constexpr int kExitInternal = 5;

enum class Command { Criterion, Certificate, Approx, Verify, Report };
enum class OutFormat { Json, Csv };

std::string to_string(Command c);
std::string to_string(OutFormat f);

// Every field is resolved at parse time; command-dependent defaults:
//   criterion    n_max 10000
//   certificate  n_max 41, kernel phipp, T 32, h 1/64
//   approx       kernel poisson, T 40, h 1/64, p 2, ladder 8..256, target poisson-shift
struct RunConfig {
  Command command = Command::Criterion;
  std::string set_spec;
  std::size_t n_max = 10000;
  std::string kernel = "phipp";
  double T = 32.0;
  double h = 1.0 / 64;
  double q = std::numeric_limits<double>::infinity();
  double p = 2.0;
  int n = 1;
  std::vector<std::size_t> ladder{8, 16, 32, 64, 128, 256};
  std::string target = "poisson-shift";
  OutFormat out = OutFormat::Json;
  std::string output_dir = ".";
  std::string input;  // verify: certificate file; report: artifact directory

  bool operator==(const RunConfig&) const = default;
};

// bad flags, unknown config keys, malformed values (exit 2)
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// args exclude the program name
RunConfig parse_config(const std::vector<std::string>& args);
// canonical form; config_from_json(render_config(c)) == c
nlohmann::json render_config(const RunConfig& c);
// strict: unknown keys are rejected, missing keys take the command's defaults
RunConfig config_from_json(const nlohmann::json& j);

struct RunResult {
  int status;
  std::vector<std::filesystem::path> written;
  std::string message;
};

// runs the pipeline for a validated config
RunResult dispatch(const RunConfig& c);

// parse + dispatch; every failure is mapped to its exit status and written as error.json
RunResult run(const std::vector<std::string>& args);

// temp file + rename
void write_atomic(const std::filesystem::path& path, const std::string& content);

// "1/64", "0.25", "pi/2", "inf"
double parse_number(const std::string& s, const std::string& what);

// PLAB_WORKERS, else the hardware concurrency
unsigned worker_count();

}  // namespace plab::cli
