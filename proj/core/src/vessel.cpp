#include "care/vessel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "care/error.hpp"

namespace care::vessel {

std::string_view to_string(Modality m) {
  switch (m) {
    case Modality::octa: return "octa";
    case Modality::cfp: return "cfp";
    case Modality::wfcfp: return "wfcfp";
    case Modality::fa: return "fa";
    case Modality::unknown: return "unknown";
  }
  return "unknown";
}

Modality parse_modality(std::string_view name) {
  for (Modality m : {Modality::octa, Modality::cfp, Modality::wfcfp, Modality::fa}) {
    if (name == to_string(m)) return m;
  }
  return Modality::unknown;
}

namespace {

// Sampled Gaussian and its first two derivatives, truncated at 4 sigma.
struct GaussianKernels {
  int radius;
  std::vector<double> g, dg, ddg;
};

GaussianKernels make_kernels(double sigma) {
  GaussianKernels k;
  k.radius = std::max(1, static_cast<int>(std::ceil(4.0 * sigma)));
  const int n = 2 * k.radius + 1;
  k.g.resize(n);
  k.dg.resize(n);
  k.ddg.resize(n);
  const double s2 = sigma * sigma;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = i - k.radius;
    k.g[i] = std::exp(-x * x / (2.0 * s2));
    sum += k.g[i];
  }
  for (int i = 0; i < n; ++i) {
    const double x = i - k.radius;
    k.g[i] /= sum;
    k.dg[i] = -x / s2 * k.g[i];
    k.ddg[i] = (x * x - s2) / (s2 * s2) * k.g[i];
  }
  // Truncation and sampling leave a DC term in the second derivative; remove it
  // so flat regions have exactly zero curvature response.
  double dc = 0.0;
  for (int i = 0; i < n; ++i) dc += k.ddg[i];
  for (int i = 0; i < n; ++i) k.ddg[i] -= dc * k.g[i];
  return k;
}

int reflect(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - i - 1;
  }
  return i;
}

// Separable convolution with mirrored borders: kx along rows, ky along columns.
std::vector<double> convolve(const std::vector<double>& src, int w, int h,
                             const std::vector<double>& kx, const std::vector<double>& ky) {
  const int rx = static_cast<int>(kx.size() / 2);
  const int ry = static_cast<int>(ky.size() / 2);
  std::vector<double> tmp(src.size()), out(src.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      // Convolution flips the kernel; matters for the odd first-derivative kernel.
      for (int i = -rx; i <= rx; ++i) acc += kx[rx - i] * src[y * w + reflect(x + i, w)];
      tmp[y * w + x] = acc;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -ry; i <= ry; ++i) acc += ky[ry - i] * tmp[reflect(y + i, h) * w + x];
      out[y * w + x] = acc;
    }
  }
  return out;
}

}  // namespace

VesselMap enhance_vesselness(const ImageGrid& raw, const VesselnessParams& params,
                             Modality modality) {
  if (params.scales.empty()) throw Error(ErrorKind::argument, "vesselness: empty scale list");
  for (double s : params.scales) {
    if (!(s > 0.0)) throw Error(ErrorKind::argument, "vesselness: scales must be positive");
  }
  const int w = raw.width();
  const int h = raw.height();
  const std::vector<double> src(raw.values().begin(), raw.values().end());
  std::vector<double> best(src.size(), 0.0);

  const double two_beta2 = 2.0 * params.beta * params.beta;
  const double two_gamma2 = 2.0 * params.gamma * params.gamma;

  for (double sigma : params.scales) {
    const GaussianKernels k = make_kernels(sigma);
    const double norm = sigma * sigma;  // scale-normalised derivatives
    const auto hxx = convolve(src, w, h, k.ddg, k.g);
    const auto hyy = convolve(src, w, h, k.g, k.ddg);
    const auto hxy = convolve(src, w, h, k.dg, k.dg);
    for (std::size_t i = 0; i < src.size(); ++i) {
      const double a = norm * hxx[i];
      const double b = norm * hxy[i];
      const double c = norm * hyy[i];
      const double mean = 0.5 * (a + c);
      const double root = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
      double l1 = mean + root;
      double l2 = mean - root;
      if (std::abs(l1) > std::abs(l2)) std::swap(l1, l2);  // |l1| <= |l2|
      // Bright ridges have strongly negative curvature across the vessel.
      if (params.bright_ridges ? l2 >= 0.0 : l2 <= 0.0) continue;
      const double rb = l1 / l2;
      const double s2 = l1 * l1 + l2 * l2;
      const double v = std::exp(-rb * rb / two_beta2) * (1.0 - std::exp(-s2 / two_gamma2));
      best[i] = std::max(best[i], v);
    }
  }

  const double peak = *std::max_element(best.begin(), best.end());
  // Below this the response is round-off from flat regions, not structure.
  constexpr double kFloor = 1e-14;
  if (peak <= kFloor) {
    std::fill(best.begin(), best.end(), 0.0);
  } else {
    for (double& v : best) v = std::clamp(v / peak, 0.0, 1.0);
  }
  return VesselMap{ImageGrid(w, h, std::move(best)), modality};
}

namespace {

// Neighbour order P2..P9: N, NE, E, SE, S, SW, W, NW.
constexpr std::array<int, 8> kDx{0, 1, 1, 1, 0, -1, -1, -1};
constexpr std::array<int, 8> kDy{-1, -1, 0, 1, 1, 1, 0, -1};

struct BinaryView {
  int w, h;
  std::vector<unsigned char> px;

  unsigned char get(int x, int y) const {
    return (x >= 0 && y >= 0 && x < w && y < h) ? px[y * w + x] : 0;
  }
};

std::array<unsigned char, 8> neighbours(const BinaryView& b, int x, int y) {
  std::array<unsigned char, 8> p{};
  for (int k = 0; k < 8; ++k) p[k] = b.get(x + kDx[k], y + kDy[k]);
  return p;
}

bool zhang_suen_deletable(const std::array<unsigned char, 8>& p, bool first_pass) {
  const int count = std::accumulate(p.begin(), p.end(), 0);
  if (count < 2 || count > 6) return false;
  int transitions = 0;
  for (int k = 0; k < 8; ++k) {
    if (p[k] == 0 && p[(k + 1) % 8] == 1) ++transitions;
  }
  if (transitions != 1) return false;
  // p[0]=P2 (N), p[2]=P4 (E), p[4]=P6 (S), p[6]=P8 (W)
  if (first_pass) return !(p[0] && p[2] && p[4]) && !(p[2] && p[4] && p[6]);
  return !(p[0] && p[2] && p[6]) && !(p[0] && p[4] && p[6]);
}

}  // namespace

Skeleton skeletonize(const ImageGrid& binary_map) {
  if (!binary_map.is_binary()) {
    throw Error(ErrorKind::contract, "skeletonize: input image is not binary");
  }
  BinaryView b{binary_map.width(), binary_map.height(), {}};
  b.px.resize(binary_map.size());
  auto v = binary_map.values();
  for (std::size_t i = 0; i < v.size(); ++i) b.px[i] = v[i] != 0.0;

  std::vector<int> candidates;
  bool changed = true;
  while (changed) {
    changed = false;
    for (bool first_pass : {true, false}) {
      candidates.clear();
      for (int y = 0; y < b.h; ++y) {
        for (int x = 0; x < b.w; ++x) {
          if (b.px[y * b.w + x] && zhang_suen_deletable(neighbours(b, x, y), first_pass)) {
            candidates.push_back(y * b.w + x);
          }
        }
      }
      for (int idx : candidates) {
        const int x = idx % b.w;
        const int y = idx / b.w;
        if (zhang_suen_deletable(neighbours(b, x, y), first_pass)) {
          b.px[idx] = 0;
          changed = true;
        }
      }
    }
  }

  std::vector<double> out(b.px.size());
  std::transform(b.px.begin(), b.px.end(), out.begin(),
                 [](unsigned char c) { return c ? 1.0 : 0.0; });
  return Skeleton{ImageGrid(b.w, b.h, std::move(out))};
}

int count_components(const ImageGrid& binary) {
  const int w = binary.width();
  const int h = binary.height();
  std::vector<unsigned char> seen(binary.size(), 0);
  std::vector<int> stack;
  int components = 0;
  for (int start = 0; start < w * h; ++start) {
    if (seen[start] || binary.values()[start] == 0.0) continue;
    ++components;
    seen[start] = 1;
    stack.push_back(start);
    while (!stack.empty()) {
      const int idx = stack.back();
      stack.pop_back();
      const int x = idx % w;
      const int y = idx / w;
      for (int k = 0; k < 8; ++k) {
        const int nx = x + kDx[k];
        const int ny = y + kDy[k];
        if (!binary.contains(nx, ny)) continue;
        const int n = ny * w + nx;
        if (!seen[n] && binary.values()[n] != 0.0) {
          seen[n] = 1;
          stack.push_back(n);
        }
      }
    }
  }
  return components;
}

}  // namespace care::vessel
