#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "epiwarn/rng.hpp"
#include "epiwarn/sde.hpp"

namespace epiwarn {

enum class Label { T, N };

inline char label_char(Label l) { return l == Label::T ? 'T' : 'N'; }
Label parse_label(std::string_view text);

struct LabeledWindow {
    std::vector<double> values;
    Label label = Label::N;
    std::string source_id;
    int gap = 0;
    /// 1-based index of the last element within the source series.
    int end_index = 0;

    int length() const { return static_cast<int>(values.size()); }
};

using WindowSet = std::vector<LabeledWindow>;

struct SplitSpec {
    int train_per_class = 1;
    int test_per_class = 1;
    std::uint64_t seed = 0;
};

inline constexpr int kDefaultWindowLength = 400;

/// I[T-L+1 .. T], label T, gap 0.
LabeledWindow slice_transcritical(const Trajectory& traj, const std::string& source_id,
                                  int length = kDefaultWindowLength);

/// I[t-L+1 .. t] with t uniform on [L, horizon], label N.
LabeledWindow slice_null(const Trajectory& traj, const std::string& source_id, CounterRng& rng,
                         int length = kDefaultWindowLength);

/// Slices every trajectory of a dataset; the null end point of replicate i is
/// drawn from stream (seed, i).
WindowSet slice_dataset(const std::vector<Trajectory>& trajectories, std::string_view prefix, std::uint64_t seed,
                        int length = kDefaultWindowLength);

/// Draws per_class T and per_class N windows from every source without replacement.
WindowSet build_mixed(const std::vector<const WindowSet*>& sources, int per_class, CounterRng& rng);

/// Stratified, leak-free train/test split.
std::pair<WindowSet, WindowSet> partition(const WindowSet& windows, const SplitSpec& spec);

inline constexpr int kRollingLength = 100;
inline constexpr int kRollingStep = 5;
inline constexpr int kRollingMaxGap = 300;
inline constexpr int kExpandingGap = 30;
inline constexpr int kExpandingStep = 5;
inline constexpr int kExpandingMaxLength = 370;

/// Length-100 sub-windows ending D = 0, 5, ..., 300 points before the parent's end (61 windows).
WindowSet rolling_windows(const LabeledWindow& window);

/// Sub-windows of length L = 5, 10, ..., 370 ending 30 points before the parent's end (74 windows).
WindowSet expanding_windows(const LabeledWindow& window);

std::vector<int> rolling_gaps();
std::vector<int> expanding_lengths();

/// Sub-window of `parent` of the given length ending `offset` points before its end.
LabeledWindow sub_window(const LabeledWindow& parent, int length, int offset);

}  // namespace epiwarn
