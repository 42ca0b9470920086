#pragma once

#include <condition_variable>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace loss {

/// Fixed pool of workers. run(count, fn) calls fn(i) for i in [0, count) with item i
/// pinned to worker i % workers, and returns once all items are done (a barrier).
class Executor {
public:
    explicit Executor(int workers = 1);
    ~Executor();
    Executor(const Executor&) = delete;
    Executor& operator=(const Executor&) = delete;

    int workers() const { return workers_; }
    void run(int count, const std::function<void(int)>& fn);

private:
    void worker_loop(int w);
    void run_share(int w);

    int workers_;
    std::vector<std::thread> threads_;
    std::mutex mu_;
    std::condition_variable cv_start_, cv_done_;
    const std::function<void(int)>* job_ = nullptr;
    int count_ = 0;
    unsigned long generation_ = 0;
    int pending_ = 0;
    bool stop_ = false;
    std::exception_ptr error_;
};

/// Two-stage run over `count` items: first(i) for every i in index order, and second(i) once
/// first(j) has finished for every j in needs[i]. Ready second stages are preferred, so an
/// item's second stage runs soon after its neighbourhood's first stages.
void run_staged(Executor& ex, int count, const std::function<void(int)>& first,
                const std::function<void(int)>& second, const std::vector<std::vector<int>>& needs);

/// Worker count from LOSS_WORKERS, or `fallback` if unset. Malformed values are a usage error.
int workers_from_env(int fallback);

} // namespace loss
