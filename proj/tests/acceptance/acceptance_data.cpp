// Bicubic baseline on Set5. Needs $SRLAB_DATA_DIR/Set5; exits 77 (skip) otherwise.

#include <cmath>
#include <cstdio>
#include <sstream>

#include "datasets.hpp"
#include "report.hpp"
#include "srlab/eval.hpp"

using namespace srlab;

namespace {

constexpr double kPsnrTol = 0.1;
constexpr double kSsimTol = 0.005;
constexpr double kChromaTol = 0.3;

struct Expected {
  int scale;
  double psnr;
};
constexpr Expected kY[] = {{2, 33.66}, {3, 30.39}, {4, 28.42}};
constexpr double kSsimX3 = 0.8682;
constexpr double kCb = 45.44;
constexpr double kCr = 45.42;

EvalReport bicubic(const std::filesystem::path& dir, int scale, EvalChannel ch, std::vector<Metric> metrics) {
  EvalProtocol p;
  p.scale = scale;
  p.channel = ch;
  p.metrics = std::move(metrics);
  return evaluate_dataset(BicubicMethod{}, dir, p);
}

std::string two(double v, int precision) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

}  // namespace

int main() {
  const auto set5 = acceptance::dataset_dir("Set5");
  if (!set5) {
    std::printf("SKIP criterion 3: set SRLAB_DATA_DIR to a directory containing Set5/\n");
    return acceptance::kSkip;
  }
  acceptance::Report report;
  bool ok = true;
  std::ostringstream s;
  double ssim3 = 0.0;
  for (const auto& e : kY) {
    const auto r = bicubic(*set5, e.scale, EvalChannel::Y, {Metric::PSNR, Metric::SSIM});
    const double p = r.averages.at(Metric::PSNR);
    if (e.scale == 3) ssim3 = r.averages.at(Metric::SSIM);
    ok &= r.failed == 0 && r.images.size() == 5 && std::abs(p - e.psnr) <= kPsnrTol;
    s << "x" << e.scale << " " << two(p, 2) << " (want " << two(e.psnr, 2) << "), ";
  }
  ok &= std::abs(ssim3 - kSsimX3) <= kSsimTol;
  const double cb = bicubic(*set5, 3, EvalChannel::Cb, {Metric::PSNR}).averages.at(Metric::PSNR);
  const double cr = bicubic(*set5, 3, EvalChannel::Cr, {Metric::PSNR}).averages.at(Metric::PSNR);
  ok &= std::abs(cb - kCb) <= kChromaTol && std::abs(cr - kCr) <= kChromaTol;
  s << "SSIM x3 " << two(ssim3, 4) << " (want 0.8682 +- 0.005), Cb/Cr x3 " << two(cb, 2) << "/" << two(cr, 2)
    << " (want 45.44/45.42 +- 0.3); Y tolerance +- 0.1 dB";
  report.line(3, ok, s.str());
  return report.exit_code();
}
