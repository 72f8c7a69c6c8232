#include "png_image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include "cepfield/errors.hpp"

namespace cepfield::cli {

std::array<unsigned char, 3> diverging(double t) {
  t = std::clamp(std::isfinite(t) ? t : 0.5, 0.0, 1.0);
  // anchors: dark blue, white, dark red
  static constexpr double lo[3] = {33, 102, 172};
  static constexpr double mid[3] = {247, 247, 247};
  static constexpr double hi[3] = {178, 24, 43};
  std::array<unsigned char, 3> rgb{};
  for (int c = 0; c < 3; ++c) {
    const double v = t < 0.5 ? lo[c] + (mid[c] - lo[c]) * (t / 0.5)
                             : mid[c] + (hi[c] - mid[c]) * ((t - 0.5) / 0.5);
    rgb[c] = static_cast<unsigned char>(std::lround(v));
  }
  return rgb;
}

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};

}  // namespace

void write_heatmaps(const std::filesystem::path& path, const std::vector<Eigen::MatrixXd>& panels,
                    const HeatmapStyle& style) {
  if (panels.empty()) throw std::invalid_argument("nothing to plot");
  const int s = style.cell;
  int width = style.gap;
  int height = 0;
  for (const auto& p : panels) {
    width += static_cast<int>(p.cols()) * s + style.gap;
    height = std::max(height, static_cast<int>(p.rows()) * s);
  }
  height += 3 * style.gap + style.colorbar;

  std::vector<unsigned char> pixels(static_cast<std::size_t>(width) * height * 3, 255);
  auto put = [&](int x, int y, std::array<unsigned char, 3> rgb) {
    unsigned char* px = &pixels[(static_cast<std::size_t>(y) * width + x) * 3];
    px[0] = rgb[0];
    px[1] = rgb[1];
    px[2] = rgb[2];
  };

  int x0 = style.gap;
  for (const auto& p : panels) {
    double lo = INFINITY, hi = -INFINITY;
    for (Eigen::Index i = 0; i < p.size(); ++i)
      if (std::isfinite(p.data()[i])) {
        lo = std::min(lo, p.data()[i]);
        hi = std::max(hi, p.data()[i]);
      }
    const double span = hi > lo ? hi - lo : 1.0;
    const int pw = static_cast<int>(p.cols()) * s;
    for (Eigen::Index r = 0; r < p.rows(); ++r)
      for (Eigen::Index c = 0; c < p.cols(); ++c) {
        const double v = p(r, c);
        const auto rgb = std::isfinite(v) ? diverging((v - lo) / span)
                                          : std::array<unsigned char, 3>{160, 160, 160};
        for (int dy = 0; dy < s; ++dy)
          for (int dx = 0; dx < s; ++dx)
            put(x0 + static_cast<int>(c) * s + dx, style.gap + static_cast<int>(r) * s + dy, rgb);
      }
    const int bar_y = height - style.gap - style.colorbar;
    for (int dx = 0; dx < pw; ++dx) {
      const auto rgb = diverging(pw > 1 ? double(dx) / (pw - 1) : 0.5);
      for (int dy = 0; dy < style.colorbar; ++dy) put(x0 + dx, bar_y + dy, rgb);
    }
    x0 += pw + style.gap;
  }

  std::filesystem::path tmp = path;
  tmp += ".tmp";
  std::unique_ptr<std::FILE, FileCloser> file(std::fopen(tmp.c_str(), "wb"));
  if (!file) throw Error("cannot open " + path.string() + " for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error("libpng failed writing " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < height; ++y) png_write_row(png, &pixels[static_cast<std::size_t>(y) * width * 3]);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fflush(file.get()) != 0) throw Error("cannot write " + tmp.string());
  file.reset();
  std::filesystem::rename(tmp, path);
}

}  // namespace cepfield::cli
