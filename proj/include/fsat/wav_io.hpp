#pragma once

#include <filesystem>
#include <optional>

#include "fsat/waveform.hpp"

namespace fsat {

// Reads a RIFF/WAVE file: PCM 16-bit or IEEE float 32-bit, 1-2 channels.
// Stereo is downmixed by channel mean; samples land in [-1, 1].
Waveform read_wav(const std::filesystem::path& path);

// Writes mono 16-bit PCM. Samples are clamped to [-1, 1] before quantization;
// a read_wav round trip is exact to one quantization step (2^-15).
void write_wav(const Waveform& w, const std::filesystem::path& path);

// Manifest: UTF-8 lines `path<TAB>label<TAB>split<TAB>source_id`,
// label in {real, fake}, split in {train, test}. Paths must be unique.
Manifest load_manifest(const std::filesystem::path& path);
void save_manifest(const Manifest& m, const std::filesystem::path& path);

// Loads the referenced WAVs (paths resolved against root), optionally
// filtered by split, preserving manifest order.
std::vector<LabeledClip> load_clips(const Manifest& m, const std::filesystem::path& root,
                                    std::optional<Split> split = std::nullopt);

}  // namespace fsat
