#pragma once

// Runs the command-line tool and compares its output with stored transcripts.

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cli {

struct Run {
  std::string output;
  int exit_code = -1;
};

inline std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size()))
    s.replace(pos, from.size(), to);
  return s;
}

/// Runs the tool with `args` ({data} expands to the test data directory),
/// merging stderr into stdout and mapping the data directory back to {data}.
inline Run run(const std::string& args) {
  const std::string data = HC_TEST_DATA;
  const std::string cmd = std::string("\"") + HC_BINARY + "\" " + replace_all(args, "{data}", data) + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) throw std::runtime_error("popen failed");
  Run r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.output = replace_all(r.output, data, "{data}");
  return r;
}

struct GoldenCase {
  std::string name;
  std::string args;
};

inline std::vector<GoldenCase> golden_cases(const std::string& dir) {
  std::ifstream in(dir + "/commands.txt");
  if (!in) throw std::runtime_error("cannot read " + dir + "/commands.txt");
  std::vector<GoldenCase> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto bar = line.find('|');
    out.push_back({line.substr(0, bar), line.substr(bar + 1)});
  }
  return out;
}

inline std::string transcript(const Run& r) { return r.output + "exit: " + std::to_string(r.exit_code) + "\n"; }

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace cli
