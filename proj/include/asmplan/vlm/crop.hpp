#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "asmplan/error.hpp"
#include "asmplan/vlm/types.hpp"

namespace asmplan::vlm {

/// Pixel rectangle, origin top-left.
struct CropBox {
  int x = 0, y = 0, width = 0, height = 0;
};

/// Crops page i to boxes[i] (pages without a box are kept) and writes PNGs
/// to `out_dir`. A box covering the whole page copies the file unchanged.
inline ManualDocument crop_manual_pages(const ManualDocument& doc, const std::vector<std::optional<CropBox>>& boxes,
                                        const std::filesystem::path& out_dir) {
  if (boxes.size() != doc.pages.size())
    throw InvalidArgument("need one crop entry per page: " + std::to_string(doc.pages.size()) + " pages, " +
                          std::to_string(boxes.size()) + " entries");
  std::filesystem::create_directories(out_dir);
  ManualDocument out = doc;
  for (std::size_t i = 0; i < doc.pages.size(); ++i) {
    if (!boxes[i]) continue;
    const auto& src = doc.pages[i].path;
    const cv::Mat img = cv::imread(src.string(), cv::IMREAD_UNCHANGED);
    if (img.empty()) throw InvalidArgument("cannot decode image " + src.string());
    const CropBox& b = *boxes[i];
    if (b.width <= 0 || b.height <= 0 || b.x < 0 || b.y < 0 || b.x + b.width > img.cols || b.y + b.height > img.rows)
      throw InvalidArgument("crop box (" + std::to_string(b.x) + ", " + std::to_string(b.y) + ", " + std::to_string(b.width) +
                            ", " + std::to_string(b.height) + ") exceeds page " + std::to_string(i + 1) + " of " +
                            std::to_string(img.cols) + "x" + std::to_string(img.rows));
    const bool whole = b.x == 0 && b.y == 0 && b.width == img.cols && b.height == img.rows;
    auto target = out_dir / (src.stem().string() + "_crop" + (whole ? src.extension().string() : ".png"));
    if (whole) {
      std::filesystem::copy_file(src, target, std::filesystem::copy_options::overwrite_existing);
    } else if (!cv::imwrite(target.string(), img(cv::Rect(b.x, b.y, b.width, b.height)))) {
      throw InvalidArgument("cannot write " + target.string());
    }
    out.pages[i].path = target;
  }
  return out;
}

}  // namespace asmplan::vlm
