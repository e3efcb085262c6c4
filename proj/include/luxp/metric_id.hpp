#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace luxp {

enum class MetricId { RgbAngular, Psnr, Rmse, SiRmse, Ssim, Vif, DeltaE, Lpips, Pieapp, Flip, HyperIqa };

enum class Orientation { LowerBetter, HigherBetter };
enum class ReferenceMode { FullReference, NoReference };
enum class Provenance { Native, External };

struct MetricInfo {
    MetricId id;
    std::string_view name; // lowercase interchange name
    Orientation orientation;
    ReferenceMode reference_mode;
    Provenance provenance;
};

const MetricInfo& info(MetricId id);
std::string_view metric_name(MetricId id);

/// Case-sensitive lookup of the lowercase interchange name.
std::optional<MetricId> find_metric(std::string_view name);
MetricId parse_metric(std::string_view name); // throws ValidationError

/// All eleven metrics in declaration order.
const std::vector<MetricId>& all_metrics();
/// The seven computed in-process.
const std::vector<MetricId>& native_metrics();
/// The K = 10 full-reference metrics used as combiner features (no HyperIQA).
const std::vector<MetricId>& combiner_metrics();

/// +1 when a larger value is better, -1 when a smaller value is better.
inline double orientation_sign(MetricId id) {
    return info(id).orientation == Orientation::HigherBetter ? 1.0 : -1.0;
}

} // namespace luxp
