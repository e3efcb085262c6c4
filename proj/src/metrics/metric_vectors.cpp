#include "luxp/error.hpp"
#include "luxp/image_io.hpp"
#include "luxp/metrics.hpp"
#include "luxp/score_table.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace luxp {

namespace {

std::map<MetricId, double> native_values(const ImageBuffer& test, const ImageBuffer& gt) {
    return {
        {MetricId::RgbAngular, rgb_angular_error(test, gt)},
        {MetricId::Psnr, psnr(test, gt)},
        {MetricId::Rmse, rmse(test, gt)},
        {MetricId::SiRmse, si_rmse(test, gt)},
        {MetricId::Ssim, ssim(test, gt)},
        {MetricId::Vif, vif(test, gt)},
        {MetricId::DeltaE, delta_e(test, gt)},
    };
}

} // namespace

std::vector<MetricVector> compute_metric_vectors(const std::vector<Stimulus>& stimuli,
                                                 const std::map<std::string, std::filesystem::path>& ground_truth,
                                                 const ExternalScoreTable& external, int jobs) {
    std::map<std::string, ImageBuffer> gt_images;
    for (const auto& s : stimuli) {
        if (gt_images.count(s.scene_id)) continue;
        auto it = ground_truth.find(s.scene_id);
        if (it == ground_truth.end()) fail_validation("no ground-truth image for scene '" + s.scene_id + "'");
        gt_images.emplace(s.scene_id, load_image(it->second, SpaceHint::SrgbEncoded));
    }

    std::vector<MetricVector> out(stimuli.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= stimuli.size()) return;
            try {
                const auto& s = stimuli[i];
                const ImageBuffer test = load_image(s.path, SpaceHint::SrgbEncoded);
                const ImageBuffer& gt = gt_images.at(s.scene_id);
                if (!test.same_shape(gt))
                    fail_validation(s.path.string() + " does not match the size of its ground-truth image");
                out[i] = MetricVector{s.scene_id, s.method_id, native_values(test, gt)};
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                next = stimuli.size();
                return;
            }
        }
    };

    const int threads = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(stimuli.size(), 1)));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (first_error) std::rethrow_exception(first_error);

    for (auto& v : out) {
        for (const auto& row : external.rows()) {
            if (row.scene_id != v.scene_id || row.method_id != v.method_id) continue;
            if (!v.values.emplace(row.metric, row.value).second)
                fail_validation("external score for " + std::string(metric_name(row.metric)) + " on " + v.scene_id +
                                "/" + v.method_id + " collides with a natively computed metric");
        }
    }
    return out;
}

} // namespace luxp
