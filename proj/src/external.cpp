// Copyright 2026 The fairsynth Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fairsynth/external.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>
#include <sstream>

#include "fairsynth/error.hpp"
#include "json.hpp"

namespace fairsynth {

namespace {

ExternalBackend FromJson(const nlohmann::json& doc) {
  ExternalBackend backend;
  try {
    backend.name = doc.at("name").get<std::string>();
    backend.command = doc.at("command").get<std::vector<std::string>>();
    backend.timeout_seconds = doc.value("timeout_seconds", 600);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("backend descriptor: ") + e.what());
  }
  if (backend.name.empty() || backend.command.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "backend descriptor needs a name and a command");
  }
  if (backend.timeout_seconds <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "timeout_seconds must be positive");
  }
  return backend;
}

void ReplaceAll(std::string& s, std::string_view from, const std::string& to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

std::string Excerpt(const std::string& text) {
  constexpr std::size_t kMax = 400;
  if (text.size() <= kMax) return text;
  return "..." + text.substr(text.size() - kMax);
}

}  // namespace

ExternalBackend ParseBackendDescriptor(std::string_view json_text) {
  try {
    return FromJson(nlohmann::json::parse(json_text));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParseError, std::string("backend descriptor: ") + e.what());
  }
}

std::vector<ExternalBackend> LoadBackendsFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(buffer.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParseError, std::string("backends file: ") + e.what());
  }
  if (!doc.is_array()) {
    throw Error(ErrorCode::kInvalidArgument, "backends file must hold a JSON list");
  }
  std::vector<ExternalBackend> out;
  for (const auto& entry : doc) out.push_back(FromJson(entry));
  return out;
}

std::vector<std::string> ExpandCommand(const ExternalBackend& backend,
                                       const ExternalInvocation& inv) {
  std::vector<std::string> argv;
  for (std::string arg : backend.command) {
    ReplaceAll(arg, "{train_csv}", inv.train_csv.string());
    ReplaceAll(arg, "{metadata_json}", inv.metadata_json.string());
    ReplaceAll(arg, "{rows}", std::to_string(inv.rows));
    ReplaceAll(arg, "{epochs}", std::to_string(inv.epochs));
    ReplaceAll(arg, "{seed}", std::to_string(inv.seed));
    ReplaceAll(arg, "{out_csv}", inv.out_csv.string());
    argv.push_back(std::move(arg));
  }
  return argv;
}

ProcessResult RunProcess(const std::vector<std::string>& argv, int timeout_seconds) {
  if (argv.empty()) throw Error(ErrorCode::kInvalidArgument, "empty command");
  std::vector<char*> cargv;
  for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
  cargv.push_back(nullptr);

  int pipe_fds[2];
  if (pipe2(pipe_fds, O_CLOEXEC) != 0) {
    throw Error(ErrorCode::kBackendFailed, std::string("pipe: ") + std::strerror(errno));
  }
  const pid_t pid = fork();
  if (pid < 0) {
    close(pipe_fds[0]);
    close(pipe_fds[1]);
    throw Error(ErrorCode::kBackendFailed, std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    dup2(pipe_fds[1], STDERR_FILENO);
    const int devnull = open("/dev/null", O_WRONLY);
    if (devnull >= 0) dup2(devnull, STDOUT_FILENO);
    execvp(cargv[0], cargv.data());
    const char msg[] = "exec failed\n";
    [[maybe_unused]] const auto n = write(STDERR_FILENO, msg, sizeof(msg) - 1);
    _exit(127);
  }
  close(pipe_fds[1]);

  ProcessResult result;
  const auto deadline =
      std::chrono::steady_clock::now() + std::chrono::seconds(timeout_seconds);
  bool pipe_open = true;
  int status = 0;
  for (;;) {
    if (pipe_open) {
      pollfd pfd{pipe_fds[0], POLLIN, 0};
      if (poll(&pfd, 1, 20) > 0) {
        char buf[4096];
        const ssize_t got = read(pipe_fds[0], buf, sizeof(buf));
        if (got > 0) {
          result.stderr_text.append(buf, static_cast<std::size_t>(got));
        } else {
          pipe_open = false;
        }
      }
    } else {
      usleep(5000);
    }
    const pid_t done = waitpid(pid, &status, WNOHANG);
    if (done == pid) break;
    if (std::chrono::steady_clock::now() > deadline) {
      kill(pid, SIGKILL);
      waitpid(pid, &status, 0);
      close(pipe_fds[0]);
      throw Error(ErrorCode::kTimeout, "backend exceeded " +
                                           std::to_string(timeout_seconds) + " s");
    }
  }
  // Drain whatever is left after exit.
  if (pipe_open) {
    fcntl(pipe_fds[0], F_SETFL, fcntl(pipe_fds[0], F_GETFL) | O_NONBLOCK);
    char buf[4096];
    ssize_t got;
    while ((got = read(pipe_fds[0], buf, sizeof(buf))) > 0) {
      result.stderr_text.append(buf, static_cast<std::size_t>(got));
    }
  }
  close(pipe_fds[0]);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  return result;
}

Dataset RunExternalBackend(const ExternalBackend& backend,
                           const ExternalInvocation& invocation,
                           const Metadata& metadata,
                           const TableSchema& expected_schema) {
  std::error_code ec;
  std::filesystem::remove(invocation.out_csv, ec);
  const ProcessResult result =
      RunProcess(ExpandCommand(backend, invocation), backend.timeout_seconds);
  if (result.exit_code != 0) {
    throw Error(ErrorCode::kBackendFailed,
                backend.name + " exited with code " + std::to_string(result.exit_code) +
                    ": " + Excerpt(result.stderr_text));
  }
  if (!std::filesystem::exists(invocation.out_csv)) {
    throw Error(ErrorCode::kBackendFailed,
                backend.name + " did not write " + invocation.out_csv.string());
  }
  const RawTable raw = ReadCsvFile(invocation.out_csv);
  LoadOptions options;
  options.expected_schema = expected_schema;
  options.require_binary_label = false;
  try {
    return DatasetFromRaw(raw, metadata, options);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kMetadataMismatch) {
      throw Error(ErrorCode::kSchemaMismatch, e.what());
    }
    throw;
  }
}

}  // namespace fairsynth
