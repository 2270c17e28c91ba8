#include "epiwarn/dataset.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "epiwarn/errors.hpp"

namespace epiwarn {

Label parse_label(std::string_view text) {
    if (text == "T" || text == "t") return Label::T;
    if (text == "N" || text == "n") return Label::N;
    throw ValidationError("unknown label '" + std::string(text) + "'");
}

namespace {

LabeledWindow cut(const std::vector<double>& series, int end, int length) {
    LabeledWindow w;
    w.values.assign(series.begin() + (end - length), series.begin() + end);
    w.end_index = end;
    return w;
}

}  // namespace

LabeledWindow slice_transcritical(const Trajectory& traj, const std::string& source_id, int length) {
    if (length < 1) throw SliceError("window length must be positive");
    if (!traj.transition_time) throw SliceError("trajectory " + source_id + " has no transition time");
    const int t = *traj.transition_time;
    if (t < length) throw SliceError("transition time " + std::to_string(t) + " earlier than window length");
    if (t > static_cast<int>(traj.incidence.size())) throw SliceError("transition time beyond recorded horizon");
    LabeledWindow w = cut(traj.incidence, t, length);
    w.label = Label::T;
    w.gap = 0;
    w.source_id = source_id;
    return w;
}

LabeledWindow slice_null(const Trajectory& traj, const std::string& source_id, CounterRng& rng, int length) {
    if (length < 1) throw SliceError("window length must be positive");
    if (traj.transition_time) throw SliceError("trajectory " + source_id + " is transcritical");
    const int horizon = static_cast<int>(traj.incidence.size());
    if (horizon < length) throw SliceError("horizon shorter than window length");
    const int end = static_cast<int>(rng.uniform_int(length, horizon));
    LabeledWindow w = cut(traj.incidence, end, length);
    w.label = Label::N;
    w.gap = 0;
    w.source_id = source_id;
    return w;
}

WindowSet slice_dataset(const std::vector<Trajectory>& trajectories, std::string_view prefix, std::uint64_t seed,
                        int length) {
    WindowSet out;
    out.reserve(trajectories.size());
    for (std::size_t i = 0; i < trajectories.size(); ++i) {
        const std::string id = std::string(prefix) + "-" + std::to_string(i);
        if (trajectories[i].transition_time) {
            out.push_back(slice_transcritical(trajectories[i], id, length));
        } else {
            CounterRng rng(seed, i);
            out.push_back(slice_null(trajectories[i], id, rng, length));
        }
    }
    return out;
}

WindowSet build_mixed(const std::vector<const WindowSet*>& sources, int per_class, CounterRng& rng) {
    if (per_class < 1) throw ValidationError("per_class must be >= 1");
    WindowSet out;
    for (std::size_t s = 0; s < sources.size(); ++s) {
        for (Label label : {Label::T, Label::N}) {
            std::vector<std::size_t> idx;
            for (std::size_t i = 0; i < sources[s]->size(); ++i)
                if ((*sources[s])[i].label == label) idx.push_back(i);
            if (static_cast<int>(idx.size()) < per_class)
                throw InsufficientDataError("source " + std::to_string(s) + " has " + std::to_string(idx.size()) +
                                            " " + label_char(label) + " windows, need " + std::to_string(per_class));
            shuffle(idx.begin(), idx.end(), rng);
            idx.resize(static_cast<std::size_t>(per_class));
            std::sort(idx.begin(), idx.end());
            for (std::size_t i : idx) out.push_back((*sources[s])[i]);
        }
    }
    return out;
}

std::pair<WindowSet, WindowSet> partition(const WindowSet& windows, const SplitSpec& spec) {
    if (spec.train_per_class < 1 || spec.test_per_class < 1) throw ValidationError("split counts must be >= 1");

    // Group by source so a source never straddles the split.
    std::map<std::string, std::vector<std::size_t>> by_source;
    for (std::size_t i = 0; i < windows.size(); ++i) by_source[windows[i].source_id].push_back(i);

    CounterRng rng(spec.seed, 0x5b117ULL);
    std::pair<WindowSet, WindowSet> result;
    for (Label label : {Label::T, Label::N}) {
        std::vector<std::string> sources;
        for (const auto& [id, members] : by_source) {
            if (windows[members.front()].label != label) continue;
            for (std::size_t m : members)
                if (windows[m].label != label) throw ValidationError("source " + id + " carries both labels");
            if (members.size() != 1) throw ValidationError("source " + id + " has multiple windows");
            sources.push_back(id);
        }
        const auto need = static_cast<std::size_t>(spec.train_per_class + spec.test_per_class);
        if (sources.size() < need)
            throw InsufficientDataError(std::string("need ") + std::to_string(need) + " " + label_char(label) +
                                        " windows, have " + std::to_string(sources.size()));
        shuffle(sources.begin(), sources.end(), rng);
        for (std::size_t k = 0; k < need; ++k) {
            const LabeledWindow& w = windows[by_source[sources[k]].front()];
            if (k < static_cast<std::size_t>(spec.train_per_class))
                result.first.push_back(w);
            else
                result.second.push_back(w);
        }
    }
    return result;
}

LabeledWindow sub_window(const LabeledWindow& parent, int length, int offset) {
    const int n = parent.length();
    if (length < 1 || offset < 0 || length + offset > n)
        throw SliceError("sub-window [len " + std::to_string(length) + ", offset " + std::to_string(offset) +
                         "] outside parent of length " + std::to_string(n));
    LabeledWindow w;
    const int end = n - offset;
    w.values.assign(parent.values.begin() + (end - length), parent.values.begin() + end);
    w.label = parent.label;
    w.source_id = parent.source_id;
    w.gap = parent.gap + offset;
    w.end_index = parent.end_index - offset;
    return w;
}

std::vector<int> rolling_gaps() {
    std::vector<int> gaps;
    for (int d = 0; d <= kRollingMaxGap; d += kRollingStep) gaps.push_back(d);
    return gaps;
}

std::vector<int> expanding_lengths() {
    std::vector<int> lengths;
    for (int l = kExpandingStep; l <= kExpandingMaxLength; l += kExpandingStep) lengths.push_back(l);
    return lengths;
}

WindowSet rolling_windows(const LabeledWindow& window) {
    if (window.length() != kDefaultWindowLength)
        throw SliceError("rolling windows need a parent of length 400, got " + std::to_string(window.length()));
    WindowSet out;
    for (int d : rolling_gaps()) out.push_back(sub_window(window, kRollingLength, d));
    return out;
}

WindowSet expanding_windows(const LabeledWindow& window) {
    if (window.length() != kDefaultWindowLength)
        throw SliceError("expanding windows need a parent of length 400, got " + std::to_string(window.length()));
    WindowSet out;
    for (int l : expanding_lengths()) out.push_back(sub_window(window, l, kExpandingGap));
    return out;
}

}  // namespace epiwarn
