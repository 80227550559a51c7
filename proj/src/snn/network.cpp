#include "neuroproxy/snn/network.hpp"

#include <algorithm>
#include <cmath>

#include "neuroproxy/errors.hpp"

namespace neuroproxy::snn {

NetworkInstance::NetworkInstance(SnnConfig config)
{
    rebuild(std::move(config));
}

void NetworkInstance::rebuild(SnnConfig config)
{
    config.validate();
    config_ = std::move(config);
    neurons_.clear();
    index_of_.clear();
    fanout_.clear();
    queue_.clear();
    next_seq_ = 0;

    neurons_.reserve(config_.neurons.size());
    for (const NeuronParams& p : config_.neurons) {
        Neuron n;
        n.threshold = p.threshold;
        n.tau_ns = p.tau_mem_ms * static_cast<double>(kNsPerMs);
        n.v_reset = p.v_reset;
        n.refractory_ns = ns_from_ms(p.refractory_ms);
        n.potential = p.v_reset;
        n.last_update = clock_;
        n.refractory_until = 0;
        index_of_[p.id] = static_cast<std::uint32_t>(neurons_.size());
        neurons_.push_back(n);
    }
    is_readout_.assign(neurons_.size(), false);
    for (std::uint32_t id : config_.readout_ids) {
        is_readout_[index_of_.at(id)] = true;
    }
    for (const SynapseParams& s : config_.synapses) {
        fanout_[s.src].push_back(
            Synapse{index_of_.at(s.dst), s.weight, ns_from_ms(s.delay_ms)});
    }
}

void NetworkInstance::reconfigure(SnnConfig config)
{
    rebuild(std::move(config));
}

void NetworkInstance::push_delivery(Delivery d)
{
    queue_.push_back(d);
    std::push_heap(queue_.begin(), queue_.end(),
                   [](const Delivery& a, const Delivery& b) { return b < a; });
}

NetworkInstance::Delivery NetworkInstance::pop_delivery()
{
    std::pop_heap(queue_.begin(), queue_.end(),
                  [](const Delivery& a, const Delivery& b) { return b < a; });
    Delivery d = queue_.back();
    queue_.pop_back();
    return d;
}

std::optional<TimeNs> NetworkInstance::next_pending_time() const
{
    if (queue_.empty()) {
        return std::nullopt;
    }
    return queue_.front().time;
}

void NetworkInstance::enqueue_fanout(std::uint32_t source_address, TimeNs spike_time)
{
    auto it = fanout_.find(source_address);
    if (it == fanout_.end()) {
        return;
    }
    for (const Synapse& s : it->second) {
        push_delivery(Delivery{spike_time + s.delay_ns, config_.neurons[s.dst_index].id,
                               source_address, s.weight, next_seq_++});
    }
}

void NetworkInstance::inject(std::span<const SpikeEvent> events)
{
    TimeNs prev = clock_;
    for (const SpikeEvent& e : events) {
        if (!config_.input_addresses.contains(e.address)) {
            throw InjectError("rejected event: address " + std::to_string(e.address) +
                              " is not an input");
        }
        if (e.timestamp < clock_) {
            throw InjectError("causality violation: event at " + std::to_string(e.timestamp) +
                              " ns is behind the clock");
        }
        if (e.timestamp < prev) {
            throw InjectError("injected events must be time-ordered");
        }
        prev = e.timestamp;
    }
    for (const SpikeEvent& e : events) {
        enqueue_fanout(e.address, e.timestamp);
    }
}

std::vector<SpikeEvent> NetworkInstance::advance(TimeNs until)
{
    if (until < clock_) {
        throw InjectError("advance target behind the clock");
    }
    std::vector<SpikeEvent> readout_spikes;
    while (!queue_.empty() && queue_.front().time <= until) {
        const Delivery d = pop_delivery();
        Neuron& n = neurons_[index_of_.at(d.dst)];
        if (d.time < n.refractory_until) {
            continue;  // dropped, potential untouched
        }
        const double gap = static_cast<double>(d.time - n.last_update);
        n.potential = n.potential * std::exp(-gap / n.tau_ns) + d.weight;
        n.last_update = d.time;
        if (n.potential >= n.threshold) {
            if (is_readout_[index_of_.at(d.dst)]) {
                readout_spikes.push_back({d.dst, d.time});
            }
            n.potential = n.v_reset;
            n.refractory_until = d.time + n.refractory_ns;
            enqueue_fanout(d.dst, d.time);
        }
    }
    clock_ = std::max(clock_, until);
    return readout_spikes;
}

TransientState NetworkInstance::snapshot_transient() const
{
    TransientState state;
    state.clock = clock_;
    state.neurons.reserve(neurons_.size());
    for (const NeuronParams& p : config_.neurons) {
        const Neuron& n = neurons_[index_of_.at(p.id)];
        NeuronTransient t;
        t.id = p.id;
        const double gap = static_cast<double>(clock_ - n.last_update);
        t.potential = n.potential * std::exp(-gap / n.tau_ns);
        t.last_update = clock_;
        t.refractory_until = n.refractory_until;
        state.neurons.push_back(t);
    }
    std::sort(state.neurons.begin(), state.neurons.end(),
              [](const NeuronTransient& a, const NeuronTransient& b) { return a.id < b.id; });
    state.pending.reserve(queue_.size());
    std::vector<Delivery> deliveries = queue_;
    std::sort(deliveries.begin(), deliveries.end());
    for (const Delivery& d : deliveries) {
        state.pending.push_back(PendingDelivery{d.time, d.dst, d.src, d.weight});
    }
    return state;
}

}  // namespace neuroproxy::snn
