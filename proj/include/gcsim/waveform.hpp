#pragma once

#include <map>
#include <string>
#include <vector>

#include "gcsim/errors.hpp"

namespace gcsim {

/// Uniformly sampled named channels from a run. The map keeps channel order
/// deterministic regardless of insertion order.
struct WaveformSet {
    double t0 = 0.0;
    double dt = 0.0;
    std::map<std::string, std::vector<double>> channels;

    [[nodiscard]] std::size_t samples() const {
        return channels.empty() ? 0 : channels.begin()->second.size();
    }

    [[nodiscard]] bool has(const std::string& name) const { return channels.count(name) > 0; }

    [[nodiscard]] const std::vector<double>& at(const std::string& name) const {
        auto it = channels.find(name);
        if (it == channels.end()) throw error("waveform channel not found: " + name);
        return it->second;
    }

    [[nodiscard]] double time_at(std::size_t index) const {
        return t0 + static_cast<double>(index) * dt;
    }
};

} // namespace gcsim
