#pragma once

// Test-time fusion: voxel/channel-wise averaging of raw logit stacks, argmax
// conversion to label maps, and majority-vote fusion of rater label maps.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "lesionbench/errors.hpp"
#include "lesionbench/volume.hpp"

namespace lesionbench {

enum class EnsembleMode {
    RawLogits,     // arithmetic mean of the raw logit values
    SoftmaxProbs,  // per-voxel softmax first, then mean (comparison mode)
};

/// Arithmetic mean of the stacks. All stacks must share dims and channels and
/// already live on a common grid (mirrored outputs un-flipped by the caller).
inline LogitStack ensemble_logits(const std::vector<LogitStack>& stacks,
                                  EnsembleMode mode = EnsembleMode::RawLogits) {
    if (stacks.empty()) throw InvalidArgumentError("ensemble_logits: no stacks");
    const LogitStack& first = stacks.front();
    if (first.channels < 2) throw InvalidArgumentError("ensemble_logits: need >= 2 channels");
    for (const LogitStack& s : stacks)
        if (s.dims != first.dims || s.channels != first.channels)
            throw DimsMismatchError("ensemble_logits: stack shape/channel mismatch");

    LogitStack out = first;
    const std::size_t total = first.values.size();
    const std::size_t nvox = first.voxel_count();
    const int nc = first.channels;

    if (mode == EnsembleMode::RawLogits) {
        std::vector<double> acc(total, 0.0);
        for (const LogitStack& s : stacks)
            for (std::size_t i = 0; i < total; ++i) acc[i] += s.values[i];
        for (std::size_t i = 0; i < total; ++i)
            out.values[i] = acc[i] / static_cast<double>(stacks.size());
        return out;
    }

    // softmax mode: stable per-voxel normalization, then mean of probabilities
    std::vector<double> acc(total, 0.0);
    std::vector<double> probs(static_cast<std::size_t>(nc));
    for (const LogitStack& s : stacks)
        for (std::size_t v = 0; v < nvox; ++v) {
            double mx = s.values[v];
            for (int c = 1; c < nc; ++c)
                mx = std::max(mx, s.values[v + nvox * static_cast<std::size_t>(c)]);
            double sum = 0;
            for (int c = 0; c < nc; ++c) {
                probs[static_cast<std::size_t>(c)] =
                    std::exp(s.values[v + nvox * static_cast<std::size_t>(c)] - mx);
                sum += probs[static_cast<std::size_t>(c)];
            }
            for (int c = 0; c < nc; ++c)
                acc[v + nvox * static_cast<std::size_t>(c)] += probs[static_cast<std::size_t>(c)] / sum;
        }
    for (std::size_t i = 0; i < total; ++i)
        out.values[i] = acc[i] / static_cast<double>(stacks.size());
    return out;
}

/// Per-voxel label of the maximal channel; exact ties go to the lowest
/// channel index. class_map assigns a label id to each channel.
inline LabelVolume argmax_labels(const LogitStack& stack, const std::map<int, int>& class_map,
                                 LabelMap label_map = {}) {
    if (stack.channels < 2) throw InvalidArgumentError("argmax_labels: need >= 2 channels");
    for (int c = 0; c < stack.channels; ++c)
        if (!class_map.count(c))
            throw InvalidArgumentError("argmax_labels: class_map misses channel " +
                                       std::to_string(c));

    LabelVolume out;
    out.dims = stack.dims;
    out.spacing = stack.spacing;
    out.affine = stack.affine;
    out.label_map = std::move(label_map);
    out.labels.assign(stack.voxel_count(), 0);

    const std::size_t nvox = stack.voxel_count();
    for (std::size_t v = 0; v < nvox; ++v) {
        int best = 0;
        double best_val = stack.values[v];
        for (int c = 1; c < stack.channels; ++c) {
            const double val = stack.values[v + nvox * static_cast<std::size_t>(c)];
            if (val > best_val) {
                best_val = val;
                best = c;
            }
        }
        out.labels[v] = class_map.at(best);
    }
    for (std::int32_t l : out.labels)
        if (l != 0 && !out.label_map.count(l)) out.label_map[l] = "label_" + std::to_string(l);
    return out;
}

/// Identity class_map: channel c votes for label c.
inline std::map<int, int> identity_class_map(int channels) {
    std::map<int, int> m;
    for (int c = 0; c < channels; ++c) m[c] = c;
    return m;
}

/// Per-voxel most frequent label across raters. Any tie for the top count
/// falls to background 0.
inline LabelVolume majority_vote(const std::vector<LabelVolume>& raters) {
    if (raters.size() < 2) throw InvalidArgumentError("majority_vote: need >= 2 raters");
    const LabelVolume& first = raters.front();
    for (const LabelVolume& r : raters) {
        if (r.dims != first.dims) throw DimsMismatchError("majority_vote: volume dims differ");
        if (r.label_map != first.label_map)
            throw InvalidArgumentError("majority_vote: label maps differ");
    }

    LabelVolume out = first;
    const std::size_t n = first.voxel_count();
    std::map<std::int32_t, int> votes;
    for (std::size_t i = 0; i < n; ++i) {
        votes.clear();
        for (const LabelVolume& r : raters) ++votes[r.labels[i]];
        int best_count = 0;
        int leaders = 0;
        std::int32_t leader = 0;
        for (const auto& [label, count] : votes) {
            if (count > best_count) {
                best_count = count;
                leaders = 1;
                leader = label;
            } else if (count == best_count) {
                ++leaders;
            }
        }
        out.labels[i] = leaders == 1 ? leader : 0;
    }
    return out;
}

}  // namespace lesionbench
