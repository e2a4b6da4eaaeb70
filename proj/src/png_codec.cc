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

#include "trojandec/png_codec.h"

#include <png.h>

#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>

#include "trojandec/error.h"

namespace trojandec {
namespace {

struct ReadState {
  std::span<const uint8_t> bytes;
  std::size_t pos = 0;
  std::vector<uint8_t> pixels;
  int height = 0;
  int width = 0;
  int channels = 0;
  bool unsupported = false;
  std::string reason;
};

void ReadFromMemory(png_structp png, png_bytep out, png_size_t length) {
  auto* state = static_cast<ReadState*>(png_get_io_ptr(png));
  if (state->pos + length > state->bytes.size()) {
    png_error(png, "truncated stream");
  }
  std::memcpy(out, state->bytes.data() + state->pos, length);
  state->pos += length;
}

void WriteToVector(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

void FlushNothing(png_structp) {}

void SilentWarning(png_structp, png_const_charp) {}

struct ReadGuard {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~ReadGuard() { png_destroy_read_struct(&png, info ? &info : nullptr, nullptr); }
};

struct WriteGuard {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~WriteGuard() { png_destroy_write_struct(&png, info ? &info : nullptr); }
};

// Returns false if libpng raised an error (longjmp); state->unsupported marks
// variants we reject deliberately.
bool DecodeInto(png_structp png, png_infop info, ReadState* state) {
  if (setjmp(png_jmpbuf(png))) return false;

  png_set_read_fn(png, state, ReadFromMemory);
  png_read_info(png, info);

  const int bit_depth = png_get_bit_depth(png, info);
  const int color_type = png_get_color_type(png, info);
  if (bit_depth == 16) {
    state->unsupported = true;
    state->reason = "16-bit samples";
    return false;
  }
  if (color_type & PNG_COLOR_MASK_ALPHA) {
    state->unsupported = true;
    state->reason = "alpha channel";
    return false;
  }
  if (color_type == PNG_COLOR_TYPE_PALETTE) {
    if (png_get_valid(png, info, PNG_INFO_tRNS)) {
      state->unsupported = true;
      state->reason = "palette with transparency";
      return false;
    }
    png_set_palette_to_rgb(png);
  } else if (bit_depth != 8) {
    state->unsupported = true;
    state->reason = "grayscale below 8 bits";
    return false;
  }
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  state->height = static_cast<int>(png_get_image_height(png, info));
  state->width = static_cast<int>(png_get_image_width(png, info));
  state->channels = png_get_channels(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  if (stride != static_cast<std::size_t>(state->width) * state->channels) {
    png_error(png, "unexpected row layout");
  }
  state->pixels.resize(stride * state->height);
  std::vector<png_bytep> rows(state->height);
  for (int r = 0; r < state->height; ++r) {
    rows[r] = state->pixels.data() + r * stride;
  }
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  return true;
}

bool EncodeInto(png_structp png, png_infop info, const Image* img,
                std::vector<uint8_t>* out) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_set_write_fn(png, out, WriteToVector, FlushNothing);
  png_set_IHDR(png, info, img->width(), img->height(), 8,
               img->channels() == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const auto data = img->data();
  for (int r = 0; r < img->height(); ++r) {
    png_write_row(png, const_cast<png_bytep>(data.data() + r * img->row_stride()));
  }
  png_write_end(png, nullptr);
  return true;
}

}  // namespace

Image DecodePng(std::span<const uint8_t> bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    throw Error(ErrorCode::kMalformedPng, "missing PNG signature");
  }
  ReadGuard guard;
  guard.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                     SilentWarning);
  if (guard.png == nullptr) throw Error(ErrorCode::kMalformedPng, "libpng init");
  guard.info = png_create_info_struct(guard.png);
  if (guard.info == nullptr) throw Error(ErrorCode::kMalformedPng, "libpng init");
  // libpng prints errors to stderr by default; route them through longjmp only.
  png_set_error_fn(guard.png, nullptr,
                   [](png_structp png, png_const_charp) {
                     png_longjmp(png, 1);
                   },
                   SilentWarning);

  auto state = std::make_unique<ReadState>();
  state->bytes = bytes;
  if (!DecodeInto(guard.png, guard.info, state.get())) {
    if (state->unsupported) {
      throw Error(ErrorCode::kUnsupportedPngVariant, state->reason);
    }
    throw Error(ErrorCode::kMalformedPng, "corrupt PNG stream");
  }
  return Image(state->height, state->width, state->channels,
               std::move(state->pixels));
}

std::vector<uint8_t> EncodePng(const Image& img) {
  if (img.empty()) throw Error(ErrorCode::kInvalidImage, "empty image");
  WriteGuard guard;
  guard.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                      SilentWarning);
  if (guard.png == nullptr) throw Error(ErrorCode::kIo, "libpng init");
  guard.info = png_create_info_struct(guard.png);
  if (guard.info == nullptr) throw Error(ErrorCode::kIo, "libpng init");
  png_set_error_fn(guard.png, nullptr,
                   [](png_structp png, png_const_charp) {
                     png_longjmp(png, 1);
                   },
                   SilentWarning);
  auto out = std::make_unique<std::vector<uint8_t>>();
  if (!EncodeInto(guard.png, guard.info, &img, out.get())) {
    throw Error(ErrorCode::kIo, "PNG encoding failed");
  }
  return std::move(*out);
}

std::vector<uint8_t> ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(in),
                              std::istreambuf_iterator<char>());
}

void WriteFileBytes(const std::filesystem::path& path,
                    std::span<const uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

Image ReadPng(const std::filesystem::path& path) {
  return DecodePng(ReadFileBytes(path));
}

void WritePng(const std::filesystem::path& path, const Image& img) {
  WriteFileBytes(path, EncodePng(img));
}

}  // namespace trojandec
