// Copyright 2026 The TrojanDec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TROJANDEC_IMAGE_H_
#define TROJANDEC_IMAGE_H_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace trojandec {

// Row-major, channel-interleaved 8-bit image with 1 (gray) or 3 (RGB)
// channels. The canonical pixel format for every pipeline stage.
class Image {
 public:
  Image() = default;
  Image(int height, int width, int channels, uint8_t fill = 0);
  // Throws kInvalidImage if data.size() != height * width * channels.
  Image(int height, int width, int channels, std::vector<uint8_t> data);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  bool empty() const { return data_.empty(); }
  bool is_square() const { return height_ == width_; }
  // Side length of a square image.
  int size() const { return height_; }

  std::size_t row_stride() const {
    return static_cast<std::size_t>(width_) * channels_;
  }
  std::size_t index(int row, int col, int ch = 0) const {
    return static_cast<std::size_t>(row) * row_stride() +
           static_cast<std::size_t>(col) * channels_ + ch;
  }

  uint8_t at(int row, int col, int ch = 0) const {
    return data_[index(row, col, ch)];
  }
  uint8_t& at(int row, int col, int ch = 0) { return data_[index(row, col, ch)]; }

  std::span<const uint8_t> data() const { return data_; }
  std::span<uint8_t> mutable_data() { return data_; }
  std::span<const uint8_t> row(int r) const {
    return std::span<const uint8_t>(data_).subspan(r * row_stride(), row_stride());
  }

  bool SameGeometry(const Image& other) const {
    return height_ == other.height_ && width_ == other.width_ &&
           channels_ == other.channels_;
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<uint8_t> data_;
};

// Rounds half-up then clamps to [0, 255].
inline uint8_t RoundToPixel(double v) {
  const double r = std::floor(v + 0.5);
  if (r <= 0.0) return 0;
  if (r >= 255.0) return 255;
  return static_cast<uint8_t>(r);
}

}  // namespace trojandec

#endif  // TROJANDEC_IMAGE_H_
