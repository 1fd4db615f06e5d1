#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "cimtune/tuner.hpp"

// After Eigen: resolv.h defines a _res macro.
#include <httplib.h>

namespace cimtune::tuner {
namespace {

using Clock = std::chrono::steady_clock;

struct Fd {
  int fd = -1;
  ~Fd() { close(); }
  void close() {
    if (fd >= 0) ::close(fd);
    fd = -1;
  }
};

// Runs `command` under /bin/sh, writes `input` to its stdin and returns stdout.
std::string run_command(const std::string& command, const std::string& input, std::chrono::milliseconds timeout) {
  int in_pipe[2], out_pipe[2];
  if (pipe(in_pipe) != 0) throw PolicyError(std::string("policy command: pipe failed: ") + std::strerror(errno));
  if (pipe(out_pipe) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw PolicyError(std::string("policy command: pipe failed: ") + std::strerror(errno));
  }
  const pid_t pid = fork();
  if (pid < 0) throw PolicyError(std::string("policy command: fork failed: ") + std::strerror(errno));
  if (pid == 0) {
    setpgid(0, 0);
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  setpgid(pid, pid);
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  Fd to_child{in_pipe[1]}, from_child{out_pipe[0]};
  fcntl(to_child.fd, F_SETFL, O_NONBLOCK);
  fcntl(from_child.fd, F_SETFL, O_NONBLOCK);

  // A child that exits without reading must not kill us.
  struct sigaction ignore {}, previous {};
  ignore.sa_handler = SIG_IGN;
  sigaction(SIGPIPE, &ignore, &previous);

  const auto deadline = Clock::now() + timeout;
  std::size_t written = 0;
  std::string output;
  bool timed_out = false;
  while (from_child.fd >= 0) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
    if (left <= 0) {
      timed_out = true;
      break;
    }
    pollfd fds[2];
    int n = 0;
    fds[n++] = {from_child.fd, POLLIN, 0};
    if (to_child.fd >= 0) fds[n++] = {to_child.fd, POLLOUT, 0};
    if (poll(fds, n, static_cast<int>(left)) < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (n == 2 && fds[1].revents) {
      const ssize_t w = write(to_child.fd, input.data() + written, input.size() - written);
      if (w > 0) written += static_cast<std::size_t>(w);
      if (w < 0 && errno != EAGAIN) written = input.size();
      if (written == input.size()) to_child.close();
    }
    if (fds[0].revents) {
      char buf[4096];
      const ssize_t r = read(from_child.fd, buf, sizeof buf);
      if (r > 0) {
        output.append(buf, static_cast<std::size_t>(r));
      } else if (r == 0 || errno != EAGAIN) {
        from_child.close();
      }
    }
  }
  to_child.close();
  from_child.close();
  sigaction(SIGPIPE, &previous, nullptr);

  if (timed_out) kill(-pid, SIGKILL);  // whole group: the shell may have forked
  int status = 0;
  while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (timed_out) {
    throw PolicyError("policy command timed out after " + std::to_string(timeout.count()) + " ms");
  }
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    throw PolicyError("policy command failed with status " +
                      std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status)));
  }
  return output;
}

std::string post_http(const std::string& url, const std::string& body, std::chrono::milliseconds timeout) {
  const std::string scheme = "http://";
  const auto slash = url.find('/', scheme.size());
  const std::string host = url.substr(0, slash);
  const std::string path = slash == std::string::npos ? "/" : url.substr(slash);
  httplib::Client client(host);
  const auto secs = timeout.count() / 1000, usecs = (timeout.count() % 1000) * 1000;
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  auto res = client.Post(path, body, "application/json");
  if (!res) throw PolicyError("policy endpoint " + url + ": " + httplib::to_string(res.error()));
  if (res->status != 200) throw PolicyError("policy endpoint " + url + " answered HTTP " + std::to_string(res->status));
  return res->body;
}

}  // namespace

Policy external_policy(const std::string& endpoint, std::vector<std::string> required_weights,
                       std::chrono::milliseconds timeout) {
  if (endpoint.empty()) throw ArgumentError("empty policy endpoint");
  if (endpoint.starts_with("https://")) throw ArgumentError("https policy endpoints are not supported");
  const bool http = endpoint.starts_with("http://");
  const std::string target = endpoint.starts_with("cmd:") ? endpoint.substr(4) : endpoint;
  return [=](const PolicyContext& ctx) {
    const std::string request = to_json(ctx).dump() + "\n";
    const std::string reply = http ? post_http(target, request, timeout) : run_command(target, request, timeout);
    Json j;
    try {
      j = Json::parse(reply);
    } catch (const Json::parse_error& e) {
      throw PolicyError(std::string("policy reply is not valid JSON: ") + e.what());
    }
    return decision_from_json(j, required_weights);
  };
}

}  // namespace cimtune::tuner
