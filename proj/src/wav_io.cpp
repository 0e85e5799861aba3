#include "fsat/wav_io.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

namespace fsat {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;

std::uint32_t read_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace

Waveform read_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("read_wav: cannot open " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    const std::size_t n = bytes.size();

    if (n < 12 || std::memcmp(p, "RIFF", 4) != 0 || std::memcmp(p + 8, "WAVE", 4) != 0)
        throw FormatError("read_wav: not a RIFF/WAVE file: " + path.string());

    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    bool have_fmt = false;
    const unsigned char* data = nullptr;
    std::uint32_t data_len = 0;

    std::size_t off = 12;
    while (off + 8 <= n) {
        const std::uint32_t chunk_len = read_u32(p + off + 4);
        const std::size_t body = off + 8;
        if (body + chunk_len > n)
            throw FormatError("read_wav: truncated chunk in " + path.string());
        if (std::memcmp(p + off, "fmt ", 4) == 0) {
            if (chunk_len < 16) throw FormatError("read_wav: short fmt chunk");
            format = read_u16(p + body);
            channels = read_u16(p + body + 2);
            rate = read_u32(p + body + 4);
            bits = read_u16(p + body + 14);
            have_fmt = true;
        } else if (std::memcmp(p + off, "data", 4) == 0) {
            data = p + body;
            data_len = chunk_len;
        }
        off = body + chunk_len + (chunk_len & 1);  // chunks are word-aligned
    }
    if (!have_fmt || data == nullptr)
        throw FormatError("read_wav: missing fmt or data chunk in " + path.string());
    if (channels < 1 || channels > 2)
        throw DecodeError("read_wav: unsupported channel count " + std::to_string(channels));
    if (rate == 0) throw FormatError("read_wav: zero sample rate");

    const bool pcm16 = format == kFormatPcm && bits == 16;
    const bool f32 = format == kFormatFloat && bits == 32;
    if (!pcm16 && !f32)
        throw DecodeError("read_wav: unsupported codec (format " + std::to_string(format) +
                          ", " + std::to_string(bits) + " bit) in " + path.string());

    const std::size_t bytes_per_sample = pcm16 ? 2 : 4;
    const std::size_t frame_bytes = bytes_per_sample * channels;
    if (data_len % frame_bytes != 0)
        throw FormatError("read_wav: data chunk not a whole number of frames");
    const std::size_t frames = data_len / frame_bytes;
    if (frames == 0) throw FormatError("read_wav: empty data chunk");

    Waveform w;
    w.sample_rate_hz = static_cast<int>(rate);
    w.samples.resize(frames);
    for (std::size_t i = 0; i < frames; ++i) {
        double acc = 0.0;
        for (std::uint16_t c = 0; c < channels; ++c) {
            const unsigned char* s = data + (i * channels + c) * bytes_per_sample;
            if (pcm16) {
                const std::int16_t raw = static_cast<std::int16_t>(s[0] | (s[1] << 8));
                acc += static_cast<double>(raw) / 32768.0;
            } else {
                float f;
                std::memcpy(&f, s, 4);
                acc += static_cast<double>(f);
            }
        }
        w.samples[i] = std::clamp(acc / channels, -1.0, 1.0);
    }
    return w;
}

void write_wav(const Waveform& w, const std::filesystem::path& path) {
    w.validate();
    const std::uint32_t n = static_cast<std::uint32_t>(w.samples.size());
    std::string out;
    out.reserve(44 + 2 * n);
    out += "RIFF";
    put_u32(out, 36 + 2 * n);
    out += "WAVE";
    out += "fmt ";
    put_u32(out, 16);
    put_u16(out, kFormatPcm);
    put_u16(out, 1);  // mono
    put_u32(out, static_cast<std::uint32_t>(w.sample_rate_hz));
    put_u32(out, static_cast<std::uint32_t>(w.sample_rate_hz) * 2);
    put_u16(out, 2);
    put_u16(out, 16);
    out += "data";
    put_u32(out, 2 * n);
    for (double s : w.samples) {
        const double clamped = std::clamp(s, -1.0, 1.0);
        long q = std::lround(clamped * 32768.0);
        q = std::clamp(q, -32768L, 32767L);
        put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
    }

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("write_wav: cannot open " + path.string() + " for writing");
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw IoError("write_wav: short write to " + path.string());
}

namespace {

Label parse_label(const std::string& s, std::size_t line_no) {
    if (s == "real") return Label::Real;
    if (s == "fake") return Label::Fake;
    throw FormatError("manifest line " + std::to_string(line_no) + ": bad label '" + s + "'");
}

Split parse_split(const std::string& s, std::size_t line_no) {
    if (s == "train") return Split::Train;
    if (s == "test") return Split::Test;
    throw FormatError("manifest line " + std::to_string(line_no) + ": bad split '" + s + "'");
}

}  // namespace

Manifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_manifest: cannot open " + path.string());
    Manifest m;
    std::set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const std::size_t tab = line.find('\t', start);
            fields.push_back(line.substr(start, tab == std::string::npos ? tab : tab - start));
            if (tab == std::string::npos) break;
            start = tab + 1;
        }
        if (fields.size() != 4)
            throw FormatError("manifest line " + std::to_string(line_no) + ": expected 4 tab-separated fields, got " +
                              std::to_string(fields.size()));
        if (fields[0].empty())
            throw FormatError("manifest line " + std::to_string(line_no) + ": empty path");
        if (!seen.insert(fields[0]).second)
            throw FormatError("manifest line " + std::to_string(line_no) + ": duplicate path '" + fields[0] + "'");
        ManifestEntry e;
        e.path = fields[0];
        e.label = parse_label(fields[1], line_no);
        e.split = parse_split(fields[2], line_no);
        e.source_id = fields[3];
        m.entries.push_back(std::move(e));
    }
    return m;
}

void save_manifest(const Manifest& m, const std::filesystem::path& path) {
    std::set<std::string> seen;
    for (const auto& e : m.entries)
        if (!seen.insert(e.path).second)
            throw FormatError("save_manifest: duplicate path '" + e.path + "'");
    std::ostringstream out;
    for (const auto& e : m.entries)
        out << e.path << '\t' << label_name(e.label) << '\t' << split_name(e.split) << '\t'
            << e.source_id << '\n';
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("save_manifest: cannot open " + path.string());
    const std::string s = out.str();
    f.write(s.data(), static_cast<std::streamsize>(s.size()));
    if (!f) throw IoError("save_manifest: short write to " + path.string());
}

std::vector<LabeledClip> load_clips(const Manifest& m, const std::filesystem::path& root,
                                    std::optional<Split> split) {
    std::vector<LabeledClip> clips;
    for (const auto& e : m.entries) {
        if (split && e.split != *split) continue;
        LabeledClip c;
        c.waveform = read_wav(root / e.path);
        c.label = e.label;
        c.split = e.split;
        c.source_id = e.source_id;
        clips.push_back(std::move(c));
    }
    return clips;
}

}  // namespace fsat
