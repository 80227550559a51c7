#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <queue>
#include <string>
#include <variant>
#include <vector>

#include "neuroproxy/codecs/codecs.hpp"
#include "neuroproxy/harness/channel.hpp"
#include "neuroproxy/harness/rng.hpp"
#include "neuroproxy/pubsub/broker.hpp"
#include "neuroproxy/spike.hpp"

namespace neuroproxy::harness {

struct SymbolMsg {
    std::uint64_t symbol = 0;
};

struct BytesMsg {
    std::vector<std::uint8_t> bytes;
};

using Payload = std::variant<SpikeEvent, codecs::Sample, SymbolMsg, BytesMsg, pubsub::Notification>;

class Simulation;

/// A scenario process. Activations arrive in deterministic
/// (time, process name, sequence) order.
class Process {
public:
    Process(std::string name, std::string kind) : name_(std::move(name)), kind_(std::move(kind)) {}
    virtual ~Process() = default;

    virtual void start(Simulation&) {}
    virtual void activate(Simulation& sim, TimeNs now, const std::string& port,
                          const Payload& payload) = 0;

    const std::string& name() const { return name_; }
    const std::string& kind() const { return kind_; }

private:
    std::string name_;
    std::string kind_;
};

/// Deterministic discrete-event engine wiring processes through lossy,
/// latent channels with per-channel rng streams derived from
/// (seed, channel name).
class Simulation {
public:
    explicit Simulation(std::uint64_t seed) : seed_(seed) {}

    void add_process(std::unique_ptr<Process> process);
    void add_channel(const std::string& name, const std::string& from_endpoint,
                     const std::string& to_endpoint, LatencySpec latency, double loss_prob);

    Process* find_process(const std::string& name);

    /// Sends a payload from `from`'s out-port through every bound channel.
    /// Loss and latency apply per channel. `sent_at` must be >= now().
    void emit(const Process& from, const std::string& port, TimeNs sent_at,
              const Payload& payload);

    /// Schedules a direct activation (self-ticks, initial stimuli).
    void schedule(const std::string& process, const std::string& port, TimeNs at,
                  Payload payload);

    /// Runs every activation with time <= until, then stops.
    void run(TimeNs until);

    TimeNs now() const { return now_; }
    std::uint64_t seed() const { return seed_; }

    const ChannelStats& channel_stats(const std::string& name) const;
    std::uint64_t activations(const std::string& process) const;
    std::uint64_t emissions(const std::string& process) const;

private:
    struct Channel {
        std::string name;
        std::string to_process;
        std::string to_port;
        ChannelModel model;
        Rng rng{0};
        ChannelStats stats;
    };

    struct Activation {
        TimeNs time;
        std::string process;
        std::string port;
        Payload payload;
        std::uint64_t seq;
    };

    struct ActivationAfter {
        bool operator()(const Activation& a, const Activation& b) const
        {
            if (a.time != b.time) return a.time > b.time;
            if (a.process != b.process) return a.process > b.process;
            return a.seq > b.seq;
        }
    };

    std::uint64_t seed_;
    std::map<std::string, std::unique_ptr<Process>> processes_;
    std::vector<Channel> channels_;
    std::map<std::string, std::vector<std::size_t>> channels_by_source_;  // "proc.port"
    std::priority_queue<Activation, std::vector<Activation>, ActivationAfter> queue_;
    std::uint64_t next_seq_ = 0;
    TimeNs now_ = 0;
    std::map<std::string, std::uint64_t> activation_count_;
    std::map<std::string, std::uint64_t> emission_count_;
};

}  // namespace neuroproxy::harness
