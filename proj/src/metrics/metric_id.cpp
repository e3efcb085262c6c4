#include "luxp/metric_id.hpp"

#include "luxp/error.hpp"

#include <array>

namespace luxp {

namespace {

using O = Orientation;
using R = ReferenceMode;
using P = Provenance;

constexpr std::array<MetricInfo, 11> registry{{
    {MetricId::RgbAngular, "rgb_angular", O::LowerBetter, R::FullReference, P::Native},
    {MetricId::Psnr, "psnr", O::HigherBetter, R::FullReference, P::Native},
    {MetricId::Rmse, "rmse", O::LowerBetter, R::FullReference, P::Native},
    {MetricId::SiRmse, "si_rmse", O::LowerBetter, R::FullReference, P::Native},
    {MetricId::Ssim, "ssim", O::HigherBetter, R::FullReference, P::Native},
    {MetricId::Vif, "vif", O::HigherBetter, R::FullReference, P::Native},
    {MetricId::DeltaE, "delta_e", O::LowerBetter, R::FullReference, P::Native},
    {MetricId::Lpips, "lpips", O::LowerBetter, R::FullReference, P::External},
    {MetricId::Pieapp, "pieapp", O::LowerBetter, R::FullReference, P::External},
    {MetricId::Flip, "flip", O::LowerBetter, R::FullReference, P::External},
    {MetricId::HyperIqa, "hyperiqa", O::HigherBetter, R::NoReference, P::External},
}};

} // namespace

const MetricInfo& info(MetricId id) { return registry[static_cast<std::size_t>(id)]; }

std::string_view metric_name(MetricId id) { return info(id).name; }

std::optional<MetricId> find_metric(std::string_view name) {
    for (const auto& m : registry)
        if (m.name == name) return m.id;
    return std::nullopt;
}

MetricId parse_metric(std::string_view name) {
    if (auto id = find_metric(name)) return *id;
    fail_validation("unknown metric name '" + std::string(name) + "'");
}

const std::vector<MetricId>& all_metrics() {
    static const std::vector<MetricId> ids = [] {
        std::vector<MetricId> v;
        for (const auto& m : registry) v.push_back(m.id);
        return v;
    }();
    return ids;
}

const std::vector<MetricId>& native_metrics() {
    static const std::vector<MetricId> ids = [] {
        std::vector<MetricId> v;
        for (const auto& m : registry)
            if (m.provenance == Provenance::Native) v.push_back(m.id);
        return v;
    }();
    return ids;
}

const std::vector<MetricId>& combiner_metrics() {
    static const std::vector<MetricId> ids = [] {
        std::vector<MetricId> v;
        for (const auto& m : registry)
            if (m.reference_mode == ReferenceMode::FullReference) v.push_back(m.id);
        return v;
    }();
    return ids;
}

} // namespace luxp
