#pragma once

#include "bene/engine.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <future>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

namespace httplib {
class Server;
}

namespace bene {

struct ServiceOptions {
    ScenarioConfig scenario;
    FaultPlan faults;
    /// Wall-clock length of one unit. 15 minutes in production; tests use
    /// a few milliseconds.
    std::chrono::milliseconds unit{std::chrono::minutes(15)};
    std::string host = "127.0.0.1";
    /// 0 binds an ephemeral port.
    int port = 0;
    std::optional<std::filesystem::path> store_path;
};

/// Response of one endpoint: HTTP status plus canonical record lines.
struct Reply {
    int status = 200;
    std::string body;
};

/// The engine lives on a single actor thread. HTTP handlers and the clock
/// only enqueue work for it, so every admission sees the free list of some
/// serial order.
class Service {
public:
    explicit Service(ServiceOptions options);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds, starts the actor and the clock and returns the bound port.
    int start();
    void stop();

    // Endpoint bodies, callable without HTTP.
    Reply submit(const std::string& body);
    Reply allocation(const std::string& id);
    Reply invoice(const std::string& request_id);
    Reply capacity_report(std::optional<TimeUnit> from, std::optional<TimeUnit> to, std::optional<std::string> theta,
                          std::optional<std::string> headroom);
    Reply health();

    [[nodiscard]] TimeUnit now() const { return now_.load(); }

private:
    template <class F>
    auto call(F f) -> decltype(f()) {
        auto task = std::make_shared<std::packaged_task<decltype(f())()>>(std::move(f));
        auto result = task->get_future();
        post([task] { (*task)(); });
        return result.get();
    }
    void post(std::function<void()> task);
    void actor_loop();
    void clock_loop();

    ServiceOptions options_;
    std::unique_ptr<Engine> engine_;
    std::unique_ptr<httplib::Server> http_;
    std::atomic<TimeUnit> now_{0};
    std::atomic<bool> running_{false};

    std::mutex mu_;
    std::condition_variable cv_;
    std::deque<std::function<void()>> queue_;
    bool closing_ = false;

    std::mutex clock_mu_;
    std::condition_variable clock_cv_;

    std::thread actor_;
    std::thread clock_;
    std::thread listener_;
};

/// Parses a submission body. `start` may be omitted for real-time work
/// (defaults to now); `units` may replace `end`.
Request parse_submission(const KvRecord& rec, TimeUnit now);

} // namespace bene
