#include "loss/executor.hpp"

#include "loss/error.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>

namespace loss {

Executor::Executor(int workers) : workers_(workers < 1 ? 1 : workers)
{
    for (int w = 1; w < workers_; ++w)
        threads_.emplace_back([this, w] { worker_loop(w); });
}

Executor::~Executor()
{
    {
        std::lock_guard<std::mutex> lock(mu_);
        stop_ = true;
    }
    cv_start_.notify_all();
    for (auto& t : threads_)
        t.join();
}

void Executor::run_share(int w)
{
    for (int i = w; i < count_; i += workers_) {
        try {
            (*job_)(i);
        } catch (...) {
            std::lock_guard<std::mutex> lock(mu_);
            if (!error_)
                error_ = std::current_exception();
        }
    }
}

void Executor::worker_loop(int w)
{
    unsigned long seen = 0;
    for (;;) {
        {
            std::unique_lock<std::mutex> lock(mu_);
            cv_start_.wait(lock, [&] { return stop_ || generation_ != seen; });
            if (stop_)
                return;
            seen = generation_;
        }
        run_share(w);
        {
            std::lock_guard<std::mutex> lock(mu_);
            if (--pending_ == 0)
                cv_done_.notify_one();
        }
    }
}

void Executor::run(int count, const std::function<void(int)>& fn)
{
    if (workers_ == 1 || count <= 1) {
        for (int i = 0; i < count; ++i)
            fn(i);
        return;
    }
    {
        std::lock_guard<std::mutex> lock(mu_);
        job_ = &fn;
        count_ = count;
        pending_ = workers_ - 1;
        error_ = nullptr;
        ++generation_;
    }
    cv_start_.notify_all();
    run_share(0);
    std::unique_lock<std::mutex> lock(mu_);
    cv_done_.wait(lock, [&] { return pending_ == 0; });
    job_ = nullptr;
    if (error_) {
        auto e = error_;
        error_ = nullptr;
        std::rethrow_exception(e);
    }
}

void run_staged(Executor& ex, int count, const std::function<void(int)>& first,
                const std::function<void(int)>& second, const std::vector<std::vector<int>>& needs)
{
    require(needs.size() == static_cast<std::size_t>(count), ErrorCode::internal, "run_staged: dependency size");
    std::vector<int> remaining(static_cast<std::size_t>(count));
    std::vector<std::vector<int>> waiters(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const auto& n = needs[static_cast<std::size_t>(i)];
        remaining[static_cast<std::size_t>(i)] = static_cast<int>(n.size());
        for (int j : n)
            waiters[static_cast<std::size_t>(j)].push_back(i);
    }
    std::deque<int> ready;
    for (int i = 0; i < count; ++i)
        if (remaining[static_cast<std::size_t>(i)] == 0)
            ready.push_back(i);
    int next_first = 0;
    int done_second = 0;
    bool failed = false;
    std::mutex mu;
    std::condition_variable cv;

    auto worker = [&](int) {
        std::unique_lock<std::mutex> lock(mu);
        for (;;) {
            cv.wait(lock, [&] { return failed || done_second == count || !ready.empty() || next_first < count; });
            if (failed || done_second == count)
                return;
            int item;
            bool is_second = !ready.empty();
            if (is_second) {
                item = ready.front();
                ready.pop_front();
            } else {
                item = next_first++;
            }
            lock.unlock();
            try {
                (is_second ? second : first)(item);
            } catch (...) {
                lock.lock();
                failed = true;
                cv.notify_all();
                throw;
            }
            lock.lock();
            if (is_second) {
                if (++done_second == count)
                    cv.notify_all();
            } else {
                for (int w : waiters[static_cast<std::size_t>(item)])
                    if (--remaining[static_cast<std::size_t>(w)] == 0) {
                        ready.push_back(w);
                        cv.notify_one();
                    }
            }
        }
    };
    ex.run(std::min(ex.workers(), count), worker);
}

int workers_from_env(int fallback)
{
    const char* s = std::getenv("LOSS_WORKERS");
    if (!s || !*s)
        return fallback;
    char* end = nullptr;
    const long v = std::strtol(s, &end, 10);
    if (*end != '\0' || v < 1 || v > 4096)
        fail(ErrorCode::usage, std::string("LOSS_WORKERS must be a positive integer, got '") + s + "'");
    return static_cast<int>(v);
}

} // namespace loss
