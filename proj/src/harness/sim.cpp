#include "neuroproxy/harness/sim.hpp"

#include "neuroproxy/errors.hpp"

namespace neuroproxy::harness {

void Simulation::add_process(std::unique_ptr<Process> process)
{
    const std::string name = process->name();
    if (!processes_.emplace(name, std::move(process)).second) {
        throw ScenarioError("duplicate process name '" + name + "'");
    }
    activation_count_[name] = 0;
    emission_count_[name] = 0;
}

void Simulation::add_channel(const std::string& name, const std::string& from_endpoint,
                             const std::string& to_endpoint, LatencySpec latency, double loss_prob)
{
    if (loss_prob < 0.0 || loss_prob > 1.0) {
        throw ScenarioError("channel '" + name + "': loss probability must lie in [0, 1]");
    }
    const auto split = [](const std::string& endpoint) {
        const std::size_t dot = endpoint.find('.');
        if (dot == std::string::npos || dot == 0 || dot + 1 >= endpoint.size()) {
            throw ScenarioError("endpoint must be 'process.port': " + endpoint);
        }
        return std::pair(endpoint.substr(0, dot), endpoint.substr(dot + 1));
    };
    const auto [from_process, from_port] = split(from_endpoint);
    const auto [to_process, to_port] = split(to_endpoint);
    if (!processes_.contains(from_process)) {
        throw ScenarioError("channel '" + name + "': unknown process '" + from_process + "'");
    }
    if (!processes_.contains(to_process)) {
        throw ScenarioError("channel '" + name + "': unknown process '" + to_process + "'");
    }
    Channel channel;
    channel.name = name;
    channel.to_process = to_process;
    channel.to_port = to_port;
    channel.model = ChannelModel{latency, loss_prob};
    channel.rng = Rng::for_channel(seed_, name);
    channels_by_source_[from_process + "." + from_port].push_back(channels_.size());
    channels_.push_back(std::move(channel));
}

Process* Simulation::find_process(const std::string& name)
{
    const auto it = processes_.find(name);
    return it == processes_.end() ? nullptr : it->second.get();
}

void Simulation::emit(const Process& from, const std::string& port, TimeNs sent_at,
                      const Payload& payload)
{
    ++emission_count_[from.name()];
    const auto it = channels_by_source_.find(from.name() + "." + port);
    if (it == channels_by_source_.end()) {
        return;  // unconnected port; the message evaporates
    }
    for (const std::size_t index : it->second) {
        Channel& channel = channels_[index];
        ++channel.stats.sent;
        if (const auto at = channel.model.transmit(sent_at, channel.rng)) {
            ++channel.stats.delivered;
            queue_.push(Activation{*at, channel.to_process, channel.to_port, payload, next_seq_++});
        } else {
            ++channel.stats.dropped;
        }
    }
}

void Simulation::schedule(const std::string& process, const std::string& port, TimeNs at,
                          Payload payload)
{
    if (!processes_.contains(process)) {
        throw ScenarioError("schedule target unknown: " + process);
    }
    queue_.push(Activation{at, process, port, std::move(payload), next_seq_++});
}

void Simulation::run(TimeNs until)
{
    for (auto& [name, process] : processes_) {
        process->start(*this);
    }
    while (!queue_.empty() && queue_.top().time <= until) {
        Activation activation = queue_.top();
        queue_.pop();
        now_ = activation.time;
        ++activation_count_[activation.process];
        processes_.at(activation.process)
            ->activate(*this, activation.time, activation.port, activation.payload);
    }
    now_ = until;
}

const ChannelStats& Simulation::channel_stats(const std::string& name) const
{
    for (const Channel& c : channels_) {
        if (c.name == name) {
            return c.stats;
        }
    }
    throw ScenarioError("unknown channel '" + name + "'");
}

std::uint64_t Simulation::activations(const std::string& process) const
{
    const auto it = activation_count_.find(process);
    return it == activation_count_.end() ? 0 : it->second;
}

std::uint64_t Simulation::emissions(const std::string& process) const
{
    const auto it = emission_count_.find(process);
    return it == emission_count_.end() ? 0 : it->second;
}

}  // namespace neuroproxy::harness
