#include "augforge/subprocess.hpp"

#include "augforge/error.hpp"

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>
#include <mutex>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace augforge {

namespace {

void ignore_sigpipe_once() {
    static std::once_flag flag;
    std::call_once(flag, [] { ::signal(SIGPIPE, SIG_IGN); });
}

void set_nonblocking(int fd) {
    const int flags = ::fcntl(fd, F_GETFL, 0);
    ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

} // namespace

SubprocessResult run_subprocess(const std::string& command,
                                std::string_view stdin_bytes,
                                double timeout_seconds) {
    ignore_sigpipe_once();

    int in_pipe[2];  // parent writes -> child stdin
    int out_pipe[2]; // child stdout -> parent reads
    if (::pipe(in_pipe) != 0 || ::pipe(out_pipe) != 0) {
        throw IoError("pipe() failed: " + std::string(std::strerror(errno)));
    }

    const pid_t pid = ::fork();
    if (pid < 0) {
        throw IoError("fork() failed: " + std::string(std::strerror(errno)));
    }
    if (pid == 0) {
        ::dup2(in_pipe[0], STDIN_FILENO);
        ::dup2(out_pipe[1], STDOUT_FILENO);
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        ::close(out_pipe[0]);
        ::close(out_pipe[1]);
        ::execl("/bin/sh", "sh", "-c", command.c_str(), nullptr);
        ::_exit(127);
    }

    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    set_nonblocking(in_pipe[1]);
    set_nonblocking(out_pipe[0]);

    SubprocessResult result;
    std::size_t written = 0;
    bool stdin_open = true;
    bool stdout_open = true;
    if (stdin_bytes.empty()) {
        ::close(in_pipe[1]);
        stdin_open = false;
    }

    const auto deadline = std::chrono::steady_clock::now() +
                          std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                              std::chrono::duration<double>(timeout_seconds));

    char buf[65536];
    while (stdin_open || stdout_open) {
        const auto now = std::chrono::steady_clock::now();
        if (now >= deadline) {
            result.timed_out = true;
            break;
        }
        const auto remaining =
            std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now);
        const int wait_ms =
            static_cast<int>(std::min<std::int64_t>(remaining.count(), 200));

        struct pollfd fds[2];
        nfds_t nfds = 0;
        int out_idx = -1;
        int in_idx = -1;
        if (stdout_open) {
            out_idx = static_cast<int>(nfds);
            fds[nfds++] = {out_pipe[0], POLLIN, 0};
        }
        if (stdin_open) {
            in_idx = static_cast<int>(nfds);
            fds[nfds++] = {in_pipe[1], POLLOUT, 0};
        }
        const int rc = ::poll(fds, nfds, std::max(wait_ms, 1));
        if (rc < 0) {
            if (errno == EINTR) continue;
            break;
        }
        if (out_idx >= 0 && (fds[out_idx].revents & (POLLIN | POLLHUP))) {
            const ssize_t n = ::read(out_pipe[0], buf, sizeof buf);
            if (n > 0) {
                result.stdout_bytes.append(buf, static_cast<std::size_t>(n));
            } else if (n == 0 || (n < 0 && errno != EAGAIN && errno != EINTR)) {
                ::close(out_pipe[0]);
                stdout_open = false;
            }
        }
        if (in_idx >= 0 && (fds[in_idx].revents & (POLLOUT | POLLERR | POLLHUP))) {
            if (fds[in_idx].revents & (POLLERR | POLLHUP)) {
                ::close(in_pipe[1]);
                stdin_open = false;
            } else {
                const ssize_t n = ::write(in_pipe[1], stdin_bytes.data() + written,
                                          stdin_bytes.size() - written);
                if (n > 0) {
                    written += static_cast<std::size_t>(n);
                    if (written == stdin_bytes.size()) {
                        ::close(in_pipe[1]);
                        stdin_open = false;
                    }
                } else if (n < 0 && errno != EAGAIN && errno != EINTR) {
                    ::close(in_pipe[1]);
                    stdin_open = false;
                }
            }
        }
    }
    if (stdin_open) ::close(in_pipe[1]);
    if (stdout_open) ::close(out_pipe[0]);

    if (result.timed_out) {
        ::kill(pid, SIGKILL);
    }
    int status = 0;
    ::waitpid(pid, &status, 0);
    if (WIFEXITED(status)) {
        result.exit_code = WEXITSTATUS(status);
    } else if (WIFSIGNALED(status)) {
        result.exit_code = 128 + WTERMSIG(status);
    }
    return result;
}

} // namespace augforge
