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

#include <filesystem>
#include <vector>

#include "gtest/gtest.h"
#include "trojandec/error.h"
#include "trojandec/rng.h"

namespace trojandec {
namespace {

Image RandomImage(Rng& rng, int h, int w, int c) {
  Image img(h, w, c);
  auto d = img.mutable_data();
  rng.FillBytes(d.begin(), d.end());
  return img;
}

// Writes a PNG through libpng's simplified API so variants the encoder never
// produces (16-bit, alpha) can be fed to the decoder.
std::vector<uint8_t> WriteVariant(png_uint_32 format, int width, int height) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = width;
  image.height = height;
  image.format = format;
  std::vector<uint8_t> pixels(PNG_IMAGE_SIZE(image), 100);
  png_alloc_size_t size = 0;
  EXPECT_TRUE(png_image_write_to_memory(&image, nullptr, &size, 0, pixels.data(), 0, nullptr));
  std::vector<uint8_t> out(size);
  EXPECT_TRUE(png_image_write_to_memory(&image, out.data(), &size, 0, pixels.data(), 0,
                                        nullptr));
  out.resize(size);
  return out;
}

ErrorCode DecodeError(const std::vector<uint8_t>& bytes) {
  try {
    DecodePng(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "decode succeeded";
  return ErrorCode::kIo;
}

TEST(PngCodecTest, SinglePixelExamples) {
  EXPECT_EQ(DecodePng(EncodePng(Image(1, 1, 3, 0))), Image(1, 1, 3, 0));
  EXPECT_EQ(DecodePng(EncodePng(Image(1, 1, 1, 255))), Image(1, 1, 1, 255));
  EXPECT_EQ(DecodePng(EncodePng(Image(2, 2, 3, 7))), Image(2, 2, 3, 7));
}

TEST(PngCodecTest, RoundTripIsIdentity) {
  Rng rng(9);
  for (int trial = 0; trial < 40; ++trial) {
    const int h = 1 + static_cast<int>(rng.Below(40));
    const int w = 1 + static_cast<int>(rng.Below(40));
    const int c = rng.Below(2) ? 3 : 1;
    const Image img = RandomImage(rng, h, w, c);
    EXPECT_EQ(DecodePng(EncodePng(img)), img);
  }
}

TEST(PngCodecTest, RandomBytesAreMalformed) {
  Rng rng(10);
  std::vector<uint8_t> junk(64);
  rng.FillBytes(junk.begin(), junk.end());
  EXPECT_EQ(DecodeError(junk), ErrorCode::kMalformedPng);
  EXPECT_EQ(DecodeError({}), ErrorCode::kMalformedPng);
}

TEST(PngCodecTest, TruncatedStreamIsMalformed) {
  Rng rng(12);
  auto bytes = EncodePng(RandomImage(rng, 16, 16, 3));
  bytes.resize(bytes.size() / 2);
  EXPECT_EQ(DecodeError(bytes), ErrorCode::kMalformedPng);
}

TEST(PngCodecTest, RejectsUnsupportedVariants) {
  EXPECT_EQ(DecodeError(WriteVariant(PNG_FORMAT_LINEAR_Y, 3, 3)),
            ErrorCode::kUnsupportedPngVariant);
  EXPECT_EQ(DecodeError(WriteVariant(PNG_FORMAT_RGBA, 3, 3)),
            ErrorCode::kUnsupportedPngVariant);
  EXPECT_EQ(DecodeError(WriteVariant(PNG_FORMAT_GA, 3, 3)),
            ErrorCode::kUnsupportedPngVariant);
}

TEST(PngCodecTest, ReadsPlainRgbFromOtherWriters) {
  const Image img = DecodePng(WriteVariant(PNG_FORMAT_RGB, 4, 2));
  EXPECT_EQ(img, Image(2, 4, 3, 100));
}

TEST(PngCodecTest, FileRoundTrip) {
  Rng rng(13);
  const auto path = std::filesystem::path(::testing::TempDir()) / "codec_roundtrip.png";
  const Image img = RandomImage(rng, 5, 7, 3);
  WritePng(path, img);
  EXPECT_EQ(ReadPng(path), img);
  std::filesystem::remove(path);
  EXPECT_THROW(ReadPng(path), Error);
}

}  // namespace
}  // namespace trojandec
