#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sys/wait.h>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "biq/cli.hpp"
#include "biq/io.hpp"

namespace biq::testing {

inline std::filesystem::path GoldenDir() { return BIQ_TEST_GOLDEN_DIR; }
inline std::filesystem::path DataDirForTests() { return BIQ_TEST_DATA_DIR; }

/// Value frozen in golden/derived_values.json by the Python oracle.
inline double Derived(const std::string& key) {
  static const nlohmann::json values =
      nlohmann::json::parse(ReadFile(GoldenDir() / "derived_values.json"));
  return values.at(key).get<double>();
}

inline std::vector<double> DerivedSeries(const std::string& key) {
  static const nlohmann::json values =
      nlohmann::json::parse(ReadFile(GoldenDir() / "derived_values.json"));
  return values.at(key).get<std::vector<double>>();
}

/// Fresh directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("biq-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

inline CliResult Cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

struct ProcessResult {
  int code = -1;
  std::string out;
};

/// Runs the built executable through the shell; stderr is discarded.
inline ProcessResult RunBinary(const std::string& args) {
  const std::string command = std::string("\"") + BIQ_CLI_PATH + "\" " + args + " 2>/dev/null";
  ProcessResult result;
  FILE* pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) return result;
  char buffer[4096];
  std::size_t n = 0;
  while ((n = std::fread(buffer, 1, sizeof buffer, pipe)) > 0) result.out.append(buffer, n);
  const int status = pclose(pipe);
  result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

}  // namespace biq::testing

#include <gtest/gtest.h>

#include "biq/error.hpp"

/// Asserts that `stmt` throws biq::Error of the given kind.
#define EXPECT_BIQ_ERROR(stmt, expected_kind)                                        \
  do {                                                                               \
    try {                                                                            \
      stmt;                                                                          \
      ADD_FAILURE() << "expected " << biq::ErrorKindName(expected_kind) << " error"; \
    } catch (const biq::Error& e) {                                                  \
      EXPECT_EQ(e.kind(), expected_kind) << e.what();                                \
    }                                                                                \
  } while (false)
