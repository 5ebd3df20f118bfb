#include "automesc/util/process.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <cstring>

#include "automesc/util/error.hpp"

extern char** environ;

namespace automesc::util {

namespace {

struct Pipe {
    int fds[2] = {-1, -1};
    Pipe()
    {
        if (::pipe2(fds, O_CLOEXEC) != 0)
            throw Error(ErrorCode::IoError, std::string("pipe: ") + std::strerror(errno));
    }
    ~Pipe()
    {
        close_read();
        close_write();
    }
    Pipe(const Pipe&) = delete;
    Pipe& operator=(const Pipe&) = delete;
    void close_read()
    {
        if (fds[0] >= 0)
            ::close(fds[0]);
        fds[0] = -1;
    }
    void close_write()
    {
        if (fds[1] >= 0)
            ::close(fds[1]);
        fds[1] = -1;
    }
};

} // namespace

ProcessResult run_process(const std::vector<std::string>& argv, const ProcessOptions& options)
{
    if (argv.empty())
        throw Error(ErrorCode::IoError, "empty argv");

    Pipe out_pipe, err_pipe, in_pipe, exec_pipe;

    std::vector<char*> cargv;
    for (const auto& a : argv)
        cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);

    std::vector<std::string> env_storage;
    for (char** e = environ; *e; ++e)
        env_storage.emplace_back(*e);
    for (const auto& e : options.env)
        env_storage.push_back(e);
    std::vector<char*> cenv;
    for (auto& e : env_storage)
        cenv.push_back(e.data());
    cenv.push_back(nullptr);

    pid_t pid = ::fork();
    if (pid < 0)
        throw Error(ErrorCode::IoError, std::string("fork: ") + std::strerror(errno));

    if (pid == 0) {
        ::setpgid(0, 0);
        ::dup2(in_pipe.fds[0], STDIN_FILENO);
        ::dup2(out_pipe.fds[1], STDOUT_FILENO);
        ::dup2(err_pipe.fds[1], STDERR_FILENO);
        if (options.cwd && ::chdir(options.cwd->c_str()) != 0) {
            int e = errno;
            (void)!::write(exec_pipe.fds[1], &e, sizeof e);
            ::_exit(127);
        }
        ::execvpe(cargv[0], cargv.data(), cenv.data());
        int e = errno;
        (void)!::write(exec_pipe.fds[1], &e, sizeof e);
        ::_exit(127);
    }

    exec_pipe.close_write();
    out_pipe.close_write();
    err_pipe.close_write();
    in_pipe.close_read();

    int child_errno = 0;
    if (::read(exec_pipe.fds[0], &child_errno, sizeof child_errno) == sizeof child_errno) {
        ::waitpid(pid, nullptr, 0);
        throw Error(ErrorCode::IoError, "cannot execute " + argv[0] + ": " + std::strerror(child_errno));
    }

    if (options.stdin_data) {
        const std::string& data = *options.stdin_data;
        std::size_t off = 0;
        ::signal(SIGPIPE, SIG_IGN);
        while (off < data.size()) {
            auto n = ::write(in_pipe.fds[1], data.data() + off, data.size() - off);
            if (n <= 0)
                break;
            off += static_cast<std::size_t>(n);
        }
    }
    in_pipe.close_write();

    ProcessResult result;
    const auto deadline = options.timeout
        ? std::optional(std::chrono::steady_clock::now() + *options.timeout)
        : std::nullopt;

    std::array<char, 8192> buf{};
    bool out_open = true, err_open = true;
    while (out_open || err_open) {
        std::array<pollfd, 2> pfds{{{out_pipe.fds[0], POLLIN, 0}, {err_pipe.fds[0], POLLIN, 0}}};
        if (!out_open)
            pfds[0].fd = -1;
        if (!err_open)
            pfds[1].fd = -1;
        int wait_ms = -1;
        if (deadline) {
            auto left = std::chrono::duration_cast<std::chrono::milliseconds>(*deadline - std::chrono::steady_clock::now());
            if (left.count() <= 0) {
                result.timed_out = true;
                ::kill(-pid, SIGKILL);
                ::kill(pid, SIGKILL);
                break;
            }
            wait_ms = static_cast<int>(left.count());
        }
        int rc = ::poll(pfds.data(), pfds.size(), wait_ms);
        if (rc < 0) {
            if (errno == EINTR)
                continue;
            break;
        }
        for (int i = 0; i < 2; ++i) {
            if (pfds[i].fd < 0 || !(pfds[i].revents & (POLLIN | POLLHUP | POLLERR)))
                continue;
            auto n = ::read(pfds[i].fd, buf.data(), buf.size());
            if (n <= 0) {
                (i == 0 ? out_open : err_open) = false;
            } else {
                (i == 0 ? result.out : result.err).append(buf.data(), static_cast<std::size_t>(n));
            }
        }
    }

    int status = 0;
    while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    if (!result.timed_out) {
        if (WIFEXITED(status))
            result.exit_code = WEXITSTATUS(status);
        else if (WIFSIGNALED(status))
            result.exit_code = 128 + WTERMSIG(status);
    }
    return result;
}

} // namespace automesc::util
