#include "forkhealth/subprocess.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "forkhealth/errors.hpp"

namespace forkhealth {

namespace fs = std::filesystem;

std::string shell_quote(const std::string& arg) {
  std::string out = "'";
  for (char c : arg) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  out += "'";
  return out;
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path unique_temp(const char* suffix) {
  static std::atomic<unsigned long> counter{0};
  auto n = counter.fetch_add(1);
  return fs::temp_directory_path() /
         ("forkhealth-" + std::to_string(::getpid()) + "-" + std::to_string(n) + suffix);
}

} // namespace

RunResult run_command(const std::vector<std::string>& argv, const std::string& cwd,
                      const std::vector<std::pair<std::string, std::string>>& env) {
  if (argv.empty()) throw Error("run_command: empty argv");
  fs::path out_path = unique_temp(".out");
  fs::path err_path = unique_temp(".err");

  std::string cmd;
  if (!cwd.empty()) cmd += "cd " + shell_quote(cwd) + " && ";
  for (const auto& [key, value] : env) cmd += key + "=" + shell_quote(value) + " ";
  for (const auto& a : argv) cmd += shell_quote(a) + " ";
  cmd += "> " + shell_quote(out_path.string()) + " 2> " + shell_quote(err_path.string());

  int status = std::system(cmd.c_str());
  RunResult result;
  result.exit_code = status < 0 ? status : (status >> 8) & 0xff;
  result.out = read_file(out_path);
  result.err = read_file(err_path);
  std::error_code ec;
  fs::remove(out_path, ec);
  fs::remove(err_path, ec);
  return result;
}

} // namespace forkhealth
