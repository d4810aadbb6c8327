#include "bene/service.hpp"

#include "bene/error.hpp"

#include <httplib.h>

#include <iostream>
#include <sstream>

namespace bene {

namespace {

Reply error_reply(int status, std::string_view code, const std::string& detail) {
    return {status, KvRecord("error").add("code", code).add("detail", detail).encode() + "\n"};
}

Reply error_reply(const Error& e) {
    int status = 400;
    switch (e.code()) {
    case ErrorCode::UnknownAllocation:
    case ErrorCode::UnknownMachine: status = 404; break;
    case ErrorCode::StorageFailure:
    case ErrorCode::Overflow: status = 500; break;
    default: break;
    }
    return error_reply(status, to_string(e.code()), e.detail());
}

std::optional<std::string> param(const httplib::Request& req, const char* name) {
    if (!req.has_param(name)) return std::nullopt;
    return req.get_param_value(name);
}

void respond(httplib::Response& res, const Reply& r) {
    res.status = r.status;
    res.set_content(r.body, "text/plain");
}

} // namespace

Request parse_submission(const KvRecord& rec, TimeUnit now) {
    auto required = [&](std::string_view key) {
        if (!rec.has(key)) throw Error(ErrorCode::MalformedRequest, "missing " + std::string(key));
        return rec.get(key);
    };
    Request r;
    r.id = required("id");
    r.enterprise = required("enterprise");
    r.kind = parse_request_kind(required("kind"));
    r.count = rec.get_int("count", 1);
    r.ctype = parse_container_type(rec.find("ctype").value_or("small"));
    const TimeUnit start = rec.has("start")                  ? rec.get_int("start")
                           : r.kind == RequestKind::RealTime ? now
                                                             : throw Error(ErrorCode::MalformedRequest, "missing start");
    const TimeUnit end = rec.has("end")     ? rec.get_int("end")
                         : rec.has("units") ? start + rec.get_int("units")
                                            : throw Error(ErrorCode::MalformedRequest, "missing end or units");
    r.window = TimeWindow(start, end);
    r.slo.max_latency_ms = rec.get_int("max_latency_ms", r.slo.max_latency_ms);
    r.slo.min_throughput_rps = rec.get_int("min_throughput_rps", r.slo.min_throughput_rps);
    r.recurrence = parse_recurrence(rec.find("recurrence").value_or("none"));
    r.submitted_at = now;
    return r;
}

Service::Service(ServiceOptions options) : options_(std::move(options)) {
    RequestStore store = options_.store_path ? RequestStore(*options_.store_path) : RequestStore();
    engine_ = std::make_unique<Engine>(options_.scenario, options_.faults, std::move(store));
    http_ = std::make_unique<httplib::Server>();
}

Service::~Service() { stop(); }

int Service::start() {
    http_->Post("/requests", [this](const httplib::Request& req, httplib::Response& res) {
        respond(res, submit(req.body));
    });
    http_->Get(R"(/allocations/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        respond(res, allocation(req.matches[1]));
    });
    http_->Get(R"(/invoices/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        respond(res, invoice(req.matches[1]));
    });
    http_->Get("/capacity-report", [this](const httplib::Request& req, httplib::Response& res) {
        try {
            auto unit = [&](const char* name) -> std::optional<TimeUnit> {
                if (auto v = param(req, name)) return parse_int(*v);
                return std::nullopt;
            };
            respond(res, capacity_report(unit("from"), unit("to"), param(req, "theta"), param(req, "headroom")));
        } catch (const Error& e) {
            respond(res, error_reply(e));
        }
    });
    http_->Get("/health", [this](const httplib::Request&, httplib::Response& res) { respond(res, health()); });

    const int port = options_.port == 0 ? http_->bind_to_any_port(options_.host)
                                        : (http_->bind_to_port(options_.host, options_.port) ? options_.port : -1);
    if (port < 0) throw Error(ErrorCode::StorageFailure, "cannot bind " + options_.host);

    running_ = true;
    actor_ = std::thread([this] { actor_loop(); });
    call([this] { engine_->step(0); });
    clock_ = std::thread([this] { clock_loop(); });
    listener_ = std::thread([this] { http_->listen_after_bind(); });
    http_->wait_until_ready();
    return port;
}

void Service::stop() {
    {
        std::lock_guard lock(clock_mu_);
        if (!running_ && !actor_.joinable()) return;
        running_ = false;
    }
    clock_cv_.notify_all();
    if (clock_.joinable()) clock_.join();
    http_->stop();
    if (listener_.joinable()) listener_.join();
    {
        std::lock_guard lock(mu_);
        closing_ = true;
    }
    cv_.notify_all();
    if (actor_.joinable()) actor_.join();
}

void Service::post(std::function<void()> task) {
    {
        std::lock_guard lock(mu_);
        queue_.push_back(std::move(task));
    }
    cv_.notify_one();
}

void Service::actor_loop() {
    while (true) {
        std::function<void()> task;
        {
            std::unique_lock lock(mu_);
            cv_.wait(lock, [this] { return closing_ || !queue_.empty(); });
            if (queue_.empty()) return;
            task = std::move(queue_.front());
            queue_.pop_front();
        }
        task();
    }
}

void Service::clock_loop() {
    auto next = std::chrono::steady_clock::now() + options_.unit;
    while (true) {
        {
            std::unique_lock lock(clock_mu_);
            if (clock_cv_.wait_until(lock, next, [this] { return !running_; })) return;
        }
        try {
            call([this] {
                const TimeUnit t = now_.load() + 1;
                engine_->step(t);
                now_ = t;
            });
        } catch (const std::exception& e) {
            std::cerr << "clock stopped: " << e.what() << '\n';
            return;
        }
        next += options_.unit;
    }
}

Reply Service::submit(const std::string& body) {
    try {
        std::istringstream in(body);
        const auto records = read_records(in);
        if (records.empty()) return error_reply(400, "MalformedRequest", "empty body");
        return call([this, rec = records.front()] {
            try {
                const TimeUnit t = now_.load();
                const Request req = parse_submission(rec, t);
                std::string out;
                for (const auto& [child, result] : engine_->submit(req, t)) {
                    KvRecord line("admission");
                    line.add("request", child.id).add("now", t);
                    if (const auto* a = std::get_if<Admitted>(&result)) {
                        line.add("status", "admitted")
                            .add("allocation", a->allocation.id)
                            .add("quote", a->quote.micros)
                            .add("preemption_warning", static_cast<std::int64_t>(a->preemption_warning))
                            .add("machines", encode_placements(a->allocation.placements));
                    } else {
                        const auto& why = std::get<Rejected>(result).reason;
                        line.add("status", "rejected").add("reason", to_string(why.code)).add("detail", why.detail);
                    }
                    out += line.encode() + "\n";
                }
                return Reply{200, out};
            } catch (const Error& e) {
                return error_reply(e);
            }
        });
    } catch (const Error& e) {
        return error_reply(e);
    }
}

Reply Service::allocation(const std::string& id) {
    return call([this, id] {
        const Allocation* a = engine_->scheduler().find(id);
        if (!a) return error_reply(404, "UnknownAllocation", "no allocation " + id);
        return Reply{200, to_record(*a).encode() + "\n"};
    });
}

Reply Service::invoice(const std::string& request_id) {
    return call([this, request_id] {
        std::string out;
        for (const auto& inv : engine_->scheduler().invoices())
            if (inv.request_id == request_id) out += encode_invoice(inv) + "\n";
        if (out.empty()) return error_reply(404, "UnknownAllocation", "no invoice for " + request_id);
        return Reply{200, out};
    });
}

Reply Service::capacity_report(std::optional<TimeUnit> from, std::optional<TimeUnit> to,
                               std::optional<std::string> theta, std::optional<std::string> headroom) {
    const Ratio th = theta ? Ratio::parse(*theta) : Ratio(1, 20);
    const Ratio hr = headroom ? Ratio::parse(*headroom) : Ratio::whole(1);
    return call([this, from, to, th, hr] {
        try {
            const TimeUnit t = now_.load();
            const TimeUnit end = to.value_or(t + 1);
            const TimeUnit begin = from.value_or(std::max<TimeUnit>(0, end - kUnitsPerDay));
            const TimeWindow w(begin, end);
            const auto report = build_capacity_report(engine_->store().all(), w,
                                                      engine_->config().machines.front(), hr, th);
            return Reply{200, render_records(report)};
        } catch (const Error& e) {
            return error_reply(e);
        }
    });
}

Reply Service::health() {
    return {200, KvRecord("health").add("status", "ok").add("now", now_.load()).encode() + "\n"};
}

} // namespace bene
