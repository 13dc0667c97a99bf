#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace unkadf {

// Exit codes used by the command-line tool.
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitArtifact = 4;
inline constexpr int kExitNumerical = 5;

// Every library failure carries a short machine-parseable class string plus
// the process exit code the CLI maps it to.
class Error : public std::runtime_error {
 public:
  Error(std::string error_class, int exit_code, const std::string& message)
      : std::runtime_error(message),
        class_(std::move(error_class)),
        exit_code_(exit_code) {}

  const std::string& error_class() const noexcept { return class_; }
  int exit_code() const noexcept { return exit_code_; }

 private:
  std::string class_;
  int exit_code_;
};

namespace errors {

inline Error usage(const std::string& msg) { return Error("usage", kExitUsage, msg); }
inline Error config(const std::string& msg) { return Error("config", kExitUsage, msg); }
inline Error parse(const std::string& msg) { return Error("parse", kExitData, msg); }
inline Error empty_dataset(const std::string& msg) { return Error("empty-dataset", kExitData, msg); }
inline Error insufficient_data(const std::string& msg) { return Error("insufficient-data", kExitData, msg); }
inline Error dimension(const std::string& msg) { return Error("dimension", kExitData, msg); }
inline Error io(const std::string& msg) { return Error("io", kExitData, msg); }
inline Error corruption(const std::string& msg) { return Error("corruption", kExitArtifact, msg); }
inline Error bad_version(const std::string& msg) { return Error("version", kExitArtifact, msg); }
inline Error malformed_artifact(const std::string& msg) { return Error("malformed-artifact", kExitArtifact, msg); }
inline Error incompatible_artifact(const std::string& msg) { return Error("incompatible-artifact", kExitArtifact, msg); }
inline Error refuse_to_save(const std::string& msg) { return Error("refuse-to-save", kExitArtifact, msg); }
inline Error numerical(const std::string& msg) { return Error("numerical", kExitNumerical, msg); }
inline Error empty_evaluation(const std::string& msg) { return Error("empty-evaluation", kExitNumerical, msg); }
inline Error undefined_metric(const std::string& msg) { return Error("undefined-metric", kExitNumerical, msg); }

}  // namespace errors
}  // namespace unkadf
