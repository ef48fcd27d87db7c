#ifndef REGEX_FORGE_SUBPROCESS_HPP
#define REGEX_FORGE_SUBPROCESS_HPP

#include <cerrno>
#include <chrono>
#include <string>
#include <vector>

#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

namespace regex_forge {

struct ProcessResult {
    bool started = false;
    bool timed_out = false;
    int exit_code = -1;  // -1 when killed by a signal
    std::string out;
    std::string error;  // spawn failure description
};

/// Runs argv with `input` on stdin, collecting stdout until exit or the
/// timeout, after which the child is killed. stderr is inherited.
inline ProcessResult run_process(const std::vector<std::string>& argv, const std::string& input,
                                 std::chrono::milliseconds timeout) {
    ProcessResult r;
    if (argv.empty()) {
        r.error = "empty command";
        return r;
    }
    // Sockets rather than pipes so writes to an exited child fail with EPIPE
    // via MSG_NOSIGNAL instead of raising SIGPIPE. Close-on-exec keeps
    // concurrently spawned children from holding each other's ends open.
    int in_fds[2], out_fds[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, in_fds) != 0) {
        r.error = "socketpair failed";
        return r;
    }
    if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, out_fds) != 0) {
        ::close(in_fds[0]);
        ::close(in_fds[1]);
        r.error = "socketpair failed";
        return r;
    }
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, in_fds[1], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, out_fds[1], STDOUT_FILENO);

    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    pid_t pid = 0;
    const int rc = ::posix_spawnp(&pid, args[0], &actions, nullptr, args.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    ::close(in_fds[1]);
    ::close(out_fds[1]);
    if (rc != 0) {
        ::close(in_fds[0]);
        ::close(out_fds[0]);
        r.error = "cannot start " + argv[0];
        return r;
    }
    r.started = true;

    const auto deadline = std::chrono::steady_clock::now() + timeout;
    std::size_t written = 0;
    int to_child = in_fds[0];
    const int from_child = out_fds[0];
    if (input.empty()) {
        ::close(to_child);
        to_child = -1;
    }
    char buf[4096];
    bool open_out = true;
    while (open_out) {
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) {
            r.timed_out = true;
            break;
        }
        pollfd fds[2] = {{from_child, POLLIN, 0}, {to_child, POLLOUT, 0}};
        const int nfds = to_child >= 0 ? 2 : 1;
        if (::poll(fds, static_cast<nfds_t>(nfds), static_cast<int>(left.count())) < 0) continue;
        if (nfds == 2 && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
            const ssize_t n = ::send(to_child, input.data() + written, input.size() - written, MSG_NOSIGNAL);
            if (n > 0) written += static_cast<std::size_t>(n);
            if (n <= 0 || written == input.size()) {
                ::shutdown(to_child, SHUT_WR);
                ::close(to_child);
                to_child = -1;
            }
        }
        if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
            const ssize_t n = ::read(from_child, buf, sizeof buf);
            if (n > 0) r.out.append(buf, static_cast<std::size_t>(n));
            else open_out = false;
        }
    }
    if (to_child >= 0) ::close(to_child);
    ::close(from_child);
    int status = 0;
    bool reaped = false;
    while (!r.timed_out) {
        const pid_t w = ::waitpid(pid, &status, WNOHANG);
        if (w == pid) {
            reaped = true;
            break;
        }
        if (w < 0 && errno != EINTR) break;
        if (std::chrono::steady_clock::now() > deadline) r.timed_out = true;
        else ::usleep(2000);
    }
    if (!reaped) {
        ::kill(pid, SIGKILL);
        while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
        }
    }
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

}  // namespace regex_forge

#endif  // REGEX_FORGE_SUBPROCESS_HPP
