#pragma once

// Single-file NIfTI-1 reader/writer. 348-byte header, magic "n+1\0" at
// offset 344, voxel data at the declared vox_offset, x fastest-varying.
// Little- or big-endian files are auto-detected via sizeof_hdr == 348.
// Whole-file gzip encoding is detected by the 0x1F 0x8B signature; gzread
// passes plain files through unchanged, so one read path covers both.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <zlib.h>

#include "lesionbench/affine.hpp"
#include "lesionbench/errors.hpp"
#include "lesionbench/volume.hpp"

namespace lesionbench::nifti {

struct NiftiError : Error {
    explicit NiftiError(const std::string& msg) : Error(msg) {}
};
/// Magic bytes are not "n+1\0" (or the header is not NIfTI-1 at all).
struct BadMagicError : NiftiError {
    explicit BadMagicError(const std::string& msg) : NiftiError(msg) {}
};
/// Datatype code outside the supported set {uint8, int16, int32, float32, float64}.
struct UnsupportedDatumKindError : NiftiError {
    explicit UnsupportedDatumKindError(const std::string& msg) : NiftiError(msg) {}
};
/// Fewer payload bytes than dim/datatype declare.
struct TruncatedPayloadError : NiftiError {
    explicit TruncatedPayloadError(const std::string& msg) : NiftiError(msg) {}
};
/// pixdim <= 0 on a spatial axis.
struct NonPositiveSpacingError : NiftiError {
    explicit NonPositiveSpacingError(const std::string& msg) : NiftiError(msg) {}
};
/// dim[0] outside {3,4}: not a 3D (+channels) volume.
struct UnsupportedDimensionError : NiftiError {
    explicit UnsupportedDimensionError(const std::string& msg) : NiftiError(msg) {}
};
/// Sample buffer inconsistent with header dims x channels.
struct SampleCountMismatchError : NiftiError {
    explicit SampleCountMismatchError(const std::string& msg) : NiftiError(msg) {}
};

enum class DatumKind : std::int16_t {
    UInt8 = 2,
    Int16 = 4,
    Int32 = 8,
    Float32 = 16,
    Float64 = 64,
};

inline int datum_byte_size(DatumKind k) {
    switch (k) {
        case DatumKind::UInt8: return 1;
        case DatumKind::Int16: return 2;
        case DatumKind::Int32: return 4;
        case DatumKind::Float32: return 4;
        case DatumKind::Float64: return 8;
    }
    throw UnsupportedDatumKindError("unknown datum kind");
}

inline bool datum_is_integer(DatumKind k) {
    return k == DatumKind::UInt8 || k == DatumKind::Int16 || k == DatumKind::Int32;
}

struct VolumeHeader {
    std::array<int, 3> dims{1, 1, 1};
    DatumKind datum_kind = DatumKind::Float32;
    std::array<double, 3> spacing{1, 1, 1};
    Affine affine = Affine::identity();
    double scale_slope = 1.0;
    double scale_intercept = 0.0;
    int channels = 0;  // 0 or 1: single-channel; >1: 4th dimension of channels

    // round-trip fidelity: unmodeled header bytes and extension blob are
    // carried verbatim and re-emitted on write
    std::vector<unsigned char> raw_header;
    std::vector<unsigned char> extension_bytes;

    std::vector<std::string> warnings;

    int effective_channels() const { return channels <= 1 ? 1 : channels; }

    std::size_t sample_count() const {
        return static_cast<std::size_t>(dims[0]) * static_cast<std::size_t>(dims[1]) *
               static_cast<std::size_t>(dims[2]) * static_cast<std::size_t>(effective_channels());
    }

    void validate() const {
        if (dims[0] < 1 || dims[1] < 1 || dims[2] < 1)
            throw UnsupportedDimensionError("header dims must each be >= 1");
        if (!(spacing[0] > 0) || !(spacing[1] > 0) || !(spacing[2] > 0))
            throw NonPositiveSpacingError("header spacing must be positive");
        if (std::abs(affine.det3()) < 1e-12)
            throw DegenerateAffineError("header affine 3x3 block is singular");
    }
};

namespace detail {

constexpr std::size_t kHeaderSize = 348;

inline std::uint16_t bswap16(std::uint16_t v) { return static_cast<std::uint16_t>((v >> 8) | (v << 8)); }
inline std::uint32_t bswap32(std::uint32_t v) {
    return (v >> 24) | ((v >> 8) & 0x0000FF00u) | ((v << 8) & 0x00FF0000u) | (v << 24);
}
inline std::uint64_t bswap64(std::uint64_t v) {
    return (static_cast<std::uint64_t>(bswap32(static_cast<std::uint32_t>(v))) << 32) |
           bswap32(static_cast<std::uint32_t>(v >> 32));
}

struct FieldCodec {
    const unsigned char* buf;
    bool swap;

    std::int16_t i16(std::size_t off) const {
        std::uint16_t v;
        std::memcpy(&v, buf + off, 2);
        if (swap) v = bswap16(v);
        std::int16_t out;
        std::memcpy(&out, &v, 2);
        return out;
    }
    std::int32_t i32(std::size_t off) const {
        std::uint32_t v;
        std::memcpy(&v, buf + off, 4);
        if (swap) v = bswap32(v);
        std::int32_t out;
        std::memcpy(&out, &v, 4);
        return out;
    }
    float f32(std::size_t off) const {
        std::uint32_t v;
        std::memcpy(&v, buf + off, 4);
        if (swap) v = bswap32(v);
        float out;
        std::memcpy(&out, &v, 4);
        return out;
    }
};

inline void put_i16(unsigned char* buf, std::size_t off, std::int16_t v) { std::memcpy(buf + off, &v, 2); }
inline void put_i32(unsigned char* buf, std::size_t off, std::int32_t v) { std::memcpy(buf + off, &v, 4); }
inline void put_f32(unsigned char* buf, std::size_t off, float v) { std::memcpy(buf + off, &v, 4); }

// q-form quaternion to rotation, scaled by pixdim; qfac flips the third column
inline Affine qform_to_affine(const FieldCodec& f, const std::array<double, 3>& spacing,
                              double qfac) {
    const double b = f.f32(256), c = f.f32(260), d = f.f32(264);
    double a2 = 1.0 - (b * b + c * c + d * d);
    const double a = a2 > 0 ? std::sqrt(a2) : 0.0;
    Affine m = Affine::identity();
    const double r[3][3] = {
        {a * a + b * b - c * c - d * d, 2 * (b * c - a * d), 2 * (b * d + a * c)},
        {2 * (b * c + a * d), a * a + c * c - b * b - d * d, 2 * (c * d - a * b)},
        {2 * (b * d - a * c), 2 * (c * d + a * b), a * a + d * d - c * c - b * b}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m.at(i, j) = r[i][j] * spacing[j] * (j == 2 ? qfac : 1.0);
    m.at(0, 3) = f.f32(268);
    m.at(1, 3) = f.f32(272);
    m.at(2, 3) = f.f32(276);
    return m;
}

// reads the whole stream through zlib so plain and gzip files share a path
class GzReader {
public:
    explicit GzReader(const std::string& path) : file_(gzopen(path.c_str(), "rb")) {
        if (!file_) throw IoError("cannot open file: " + path);
    }
    ~GzReader() {
        if (file_) gzclose(file_);
    }
    GzReader(const GzReader&) = delete;
    GzReader& operator=(const GzReader&) = delete;

    // returns bytes actually read, <= n
    std::size_t read(unsigned char* dst, std::size_t n) {
        std::size_t got = 0;
        while (got < n) {
            const unsigned chunk =
                static_cast<unsigned>(std::min<std::size_t>(n - got, 1u << 30));
            const int r = gzread(file_, dst + got, chunk);
            if (r < 0) throw IoError("gzip stream error while reading");
            if (r == 0) break;  // eof
            got += static_cast<std::size_t>(r);
        }
        return got;
    }

    bool has_more() {
        unsigned char probe;
        return read(&probe, 1) == 1;
    }

private:
    gzFile file_;
};

inline double decode_sample(const unsigned char* p, DatumKind kind, bool swap) {
    switch (kind) {
        case DatumKind::UInt8:
            return static_cast<double>(*p);
        case DatumKind::Int16: {
            std::uint16_t v;
            std::memcpy(&v, p, 2);
            if (swap) v = bswap16(v);
            std::int16_t s;
            std::memcpy(&s, &v, 2);
            return static_cast<double>(s);
        }
        case DatumKind::Int32: {
            std::uint32_t v;
            std::memcpy(&v, p, 4);
            if (swap) v = bswap32(v);
            std::int32_t s;
            std::memcpy(&s, &v, 4);
            return static_cast<double>(s);
        }
        case DatumKind::Float32: {
            std::uint32_t v;
            std::memcpy(&v, p, 4);
            if (swap) v = bswap32(v);
            float s;
            std::memcpy(&s, &v, 4);
            return static_cast<double>(s);
        }
        case DatumKind::Float64: {
            std::uint64_t v;
            std::memcpy(&v, p, 8);
            if (swap) v = bswap64(v);
            double s;
            std::memcpy(&s, &v, 8);
            return s;
        }
    }
    throw UnsupportedDatumKindError("unknown datum kind");
}

inline void encode_sample(unsigned char* p, DatumKind kind, double v) {
    switch (kind) {
        case DatumKind::UInt8: {
            const long long r = std::llround(v);
            *p = static_cast<unsigned char>(std::clamp<long long>(r, 0, 255));
            return;
        }
        case DatumKind::Int16: {
            const long long r = std::llround(v);
            const std::int16_t s = static_cast<std::int16_t>(std::clamp<long long>(r, -32768, 32767));
            std::memcpy(p, &s, 2);
            return;
        }
        case DatumKind::Int32: {
            const long long r = std::llround(v);
            const std::int32_t s = static_cast<std::int32_t>(
                std::clamp<long long>(r, std::numeric_limits<std::int32_t>::min(),
                                      std::numeric_limits<std::int32_t>::max()));
            std::memcpy(p, &s, 4);
            return;
        }
        case DatumKind::Float32: {
            const float s = static_cast<float>(v);
            std::memcpy(p, &s, 4);
            return;
        }
        case DatumKind::Float64: {
            std::memcpy(p, &v, 8);
            return;
        }
    }
    throw UnsupportedDatumKindError("unknown datum kind");
}

}  // namespace detail

/// Parses a single-file NIfTI-1 volume (plain or gzip). Samples are returned
/// in header-declared order (x fastest, channel slowest) with scl_slope /
/// scl_inter applied whenever the slope is a non-identity scaling.
inline std::pair<VolumeHeader, std::vector<double>> read_volume(const std::string& path) {
    using namespace detail;

    if (!std::filesystem::exists(path)) throw IoError("file does not exist: " + path);
    GzReader in(path);

    std::vector<unsigned char> hdr(kHeaderSize);
    if (in.read(hdr.data(), kHeaderSize) != kHeaderSize)
        throw BadMagicError("file shorter than the 348-byte NIfTI-1 header: " + path);

    // endianness: sizeof_hdr must decode to 348 one way or the other
    FieldCodec native{hdr.data(), false};
    bool swap = false;
    if (native.i32(0) != 348) {
        FieldCodec swapped{hdr.data(), true};
        if (swapped.i32(0) != 348)
            throw BadMagicError("sizeof_hdr is not 348 in either byte order: " + path);
        swap = true;
    }
    FieldCodec f{hdr.data(), swap};

    if (std::memcmp(hdr.data() + 344, "n+1\0", 4) != 0) {
        if (std::memcmp(hdr.data() + 344, "ni1\0", 4) == 0)
            throw BadMagicError("two-file (.hdr/.img) NIfTI is not supported: " + path);
        throw BadMagicError("bad NIfTI-1 magic at offset 344: " + path);
    }

    VolumeHeader header;

    const int ndim = f.i16(40);
    if (ndim != 3 && ndim != 4)
        throw UnsupportedDimensionError("only 3D (+channel axis) volumes supported, dim[0]=" +
                                        std::to_string(ndim));
    for (int a = 0; a < 3; ++a) {
        const int d = f.i16(40 + 2 * (a + 1));
        if (d < 1)
            throw UnsupportedDimensionError("dim[" + std::to_string(a + 1) + "] = " +
                                            std::to_string(d));
        header.dims[a] = d;
    }
    header.channels = ndim == 4 ? f.i16(48) : 0;
    if (ndim == 4 && header.channels < 1)
        throw UnsupportedDimensionError("dim[4] = " + std::to_string(header.channels));

    const std::int16_t dtype = f.i16(70);
    switch (dtype) {
        case 2: header.datum_kind = DatumKind::UInt8; break;
        case 4: header.datum_kind = DatumKind::Int16; break;
        case 8: header.datum_kind = DatumKind::Int32; break;
        case 16: header.datum_kind = DatumKind::Float32; break;
        case 64: header.datum_kind = DatumKind::Float64; break;
        default:
            throw UnsupportedDatumKindError("unsupported NIfTI datatype code " +
                                            std::to_string(dtype));
    }
    const int expected_bitpix = 8 * datum_byte_size(header.datum_kind);
    if (f.i16(72) != expected_bitpix)
        header.warnings.push_back("bitpix disagrees with datatype; trusting datatype");

    for (int a = 0; a < 3; ++a) {
        const double s = f.f32(76 + 4 * (a + 1));
        if (!(s > 0))
            throw NonPositiveSpacingError("pixdim[" + std::to_string(a + 1) +
                                          "] is not positive");
        header.spacing[a] = s;
    }

    header.scale_slope = f.f32(112);
    header.scale_intercept = f.f32(116);

    const std::int16_t qform_code = f.i16(252);
    const std::int16_t sform_code = f.i16(254);
    if (sform_code > 0) {
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 4; ++c) header.affine.at(r, c) = f.f32(280 + 16 * r + 4 * c);
        header.affine.at(3, 0) = header.affine.at(3, 1) = header.affine.at(3, 2) = 0;
        header.affine.at(3, 3) = 1;
    } else if (qform_code > 0) {
        const float pixdim0 = f.f32(76);
        const double qfac = pixdim0 < 0 ? -1.0 : 1.0;
        header.affine = detail::qform_to_affine(f, header.spacing, qfac);
    } else {
        header.affine = Affine::diagonal(header.spacing);
        header.warnings.push_back(
            "neither s-form nor q-form present; assuming diagonal affine of spacings");
    }

    // keep spacing consistent with the affine actually in use
    for (int a = 0; a < 3; ++a) {
        const double n = header.affine.column_norm(a);
        if (n > 0 && std::abs(n - header.spacing[a]) > 1e-3 * header.spacing[a]) {
            header.warnings.push_back("pixdim disagrees with affine column norms; using norms");
            header.spacing = header.affine.column_norms();
            break;
        }
    }

    // normalize the preserved header bytes to little-endian host order
    if (swap) {
        auto swap_range = [&hdr](std::size_t off, std::size_t n, int width) {
            for (std::size_t i = 0; i < n; ++i) {
                unsigned char* p = hdr.data() + off + i * width;
                std::reverse(p, p + width);
            }
        };
        swap_range(0, 1, 4);     // sizeof_hdr
        swap_range(32, 1, 4);    // extents
        swap_range(36, 1, 2);    // session_error
        swap_range(40, 8, 2);    // dim
        swap_range(56, 3, 4);    // intent_p1..p3
        swap_range(68, 3, 2);    // intent_code, datatype, bitpix
        swap_range(74, 1, 2);    // slice_start
        swap_range(76, 8, 4);    // pixdim
        swap_range(108, 3, 4);   // vox_offset, scl_slope, scl_inter
        swap_range(120, 1, 2);   // slice_end
        swap_range(124, 4, 4);   // cal_max..toffset
        swap_range(140, 2, 4);   // glmax, glmin
        swap_range(252, 2, 2);   // qform_code, sform_code
        swap_range(256, 6, 4);   // quatern_b..qoffset_z
        swap_range(280, 12, 4);  // srow
    }
    header.raw_header = hdr;

    const double vox_offset_f = f.f32(108);
    if (!(vox_offset_f >= static_cast<double>(kHeaderSize)))
        throw BadMagicError("vox_offset " + std::to_string(vox_offset_f) + " is before header end");
    const std::size_t vox_offset = static_cast<std::size_t>(vox_offset_f);

    header.extension_bytes.resize(vox_offset - kHeaderSize);
    if (!header.extension_bytes.empty() &&
        in.read(header.extension_bytes.data(), header.extension_bytes.size()) !=
            header.extension_bytes.size())
        throw TruncatedPayloadError("file ends inside the header extension area: " + path);

    const std::size_t n = header.sample_count();
    const std::size_t bsize = static_cast<std::size_t>(datum_byte_size(header.datum_kind));
    std::vector<unsigned char> payload(n * bsize);
    const std::size_t got = in.read(payload.data(), payload.size());
    if (got != payload.size())
        throw TruncatedPayloadError("payload has " + std::to_string(got) + " bytes, expected " +
                                    std::to_string(payload.size()) + ": " + path);
    if (in.has_more()) header.warnings.push_back("trailing bytes after declared payload ignored");

    std::vector<double> samples(n);
    const bool apply_scale =
        header.scale_slope != 0.0 && !(header.scale_slope == 1.0 && header.scale_intercept == 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double v = detail::decode_sample(payload.data() + i * bsize, header.datum_kind, swap);
        if (apply_scale) v = v * header.scale_slope + header.scale_intercept;
        samples[i] = v;
    }
    return {std::move(header), std::move(samples)};
}

/// Emits a conforming single-file volume. The s-form carries the affine;
/// preserved raw header bytes (if any) supply every unmodeled field. Output
/// is gzip-compressed when `path` ends in ".gz".
inline void write_volume(const VolumeHeader& header, const std::vector<double>& samples,
                         const std::string& path) {
    using namespace detail;

    header.validate();
    if (samples.size() != header.sample_count())
        throw SampleCountMismatchError("sample count " + std::to_string(samples.size()) +
                                       " does not match dims x channels " +
                                       std::to_string(header.sample_count()));

    std::vector<unsigned char> hdr(kHeaderSize, 0);
    if (header.raw_header.size() == kHeaderSize) hdr = header.raw_header;

    put_i32(hdr.data(), 0, 348);
    hdr[38] = 'r';  // regular

    const bool multichannel = header.channels > 1;
    put_i16(hdr.data(), 40, multichannel ? 4 : 3);
    put_i16(hdr.data(), 42, static_cast<std::int16_t>(header.dims[0]));
    put_i16(hdr.data(), 44, static_cast<std::int16_t>(header.dims[1]));
    put_i16(hdr.data(), 46, static_cast<std::int16_t>(header.dims[2]));
    put_i16(hdr.data(), 48, static_cast<std::int16_t>(multichannel ? header.channels : 1));
    for (std::size_t off = 50; off <= 54; off += 2) put_i16(hdr.data(), off, 1);

    put_i16(hdr.data(), 70, static_cast<std::int16_t>(header.datum_kind));
    put_i16(hdr.data(), 72, static_cast<std::int16_t>(8 * datum_byte_size(header.datum_kind)));

    if (header.raw_header.size() != kHeaderSize) put_f32(hdr.data(), 76, 1.0f);  // qfac
    put_f32(hdr.data(), 80, static_cast<float>(header.spacing[0]));
    put_f32(hdr.data(), 84, static_cast<float>(header.spacing[1]));
    put_f32(hdr.data(), 88, static_cast<float>(header.spacing[2]));

    const std::size_t vox_offset =
        kHeaderSize + (header.extension_bytes.empty() ? 4 : header.extension_bytes.size());
    put_f32(hdr.data(), 108, static_cast<float>(vox_offset));
    put_f32(hdr.data(), 112, static_cast<float>(header.scale_slope));
    put_f32(hdr.data(), 116, static_cast<float>(header.scale_intercept));
    hdr[123] = 2;  // xyzt_units: millimetres

    put_i16(hdr.data(), 254, 1);  // sform_code: scanner anatomical
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 4; ++c)
            put_f32(hdr.data(), 280 + 16 * r + 4 * c, static_cast<float>(header.affine.at(r, c)));

    std::memcpy(hdr.data() + 344, "n+1\0", 4);

    const std::size_t bsize = static_cast<std::size_t>(datum_byte_size(header.datum_kind));
    std::vector<unsigned char> payload(samples.size() * bsize);
    for (std::size_t i = 0; i < samples.size(); ++i)
        encode_sample(payload.data() + i * bsize, header.datum_kind, samples[i]);

    static const unsigned char kNoExtension[4] = {0, 0, 0, 0};
    const unsigned char* ext =
        header.extension_bytes.empty() ? kNoExtension : header.extension_bytes.data();
    const std::size_t ext_size = header.extension_bytes.empty() ? 4 : header.extension_bytes.size();

    const bool gz = path.size() > 3 && path.compare(path.size() - 3, 3, ".gz") == 0;
    if (gz) {
        gzFile out = gzopen(path.c_str(), "wb");
        if (!out) throw IoError("cannot open for writing: " + path);
        auto write_all = [&out, &path](const unsigned char* p, std::size_t n) {
            std::size_t done = 0;
            while (done < n) {
                const unsigned chunk =
                    static_cast<unsigned>(std::min<std::size_t>(n - done, 1u << 30));
                const int w = gzwrite(out, p + done, chunk);
                if (w <= 0) {
                    gzclose(out);
                    throw IoError("gzip write failed: " + path);
                }
                done += static_cast<std::size_t>(w);
            }
        };
        write_all(hdr.data(), hdr.size());
        write_all(ext, ext_size);
        write_all(payload.data(), payload.size());
        if (gzclose(out) != Z_OK) throw IoError("gzip close failed: " + path);
    } else {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open for writing: " + path);
        out.write(reinterpret_cast<const char*>(hdr.data()), static_cast<std::streamsize>(hdr.size()));
        out.write(reinterpret_cast<const char*>(ext), static_cast<std::streamsize>(ext_size));
        out.write(reinterpret_cast<const char*>(payload.data()),
                  static_cast<std::streamsize>(payload.size()));
        if (!out) throw IoError("write failed: " + path);
    }
}

// ---- typed convenience wrappers -------------------------------------------

inline LabelVolume to_label_volume(const VolumeHeader& header, const std::vector<double>& samples,
                                   LabelMap label_map = {}) {
    if (header.effective_channels() != 1)
        throw UnsupportedDimensionError("label volume must be single-channel");
    LabelVolume vol;
    vol.dims = header.dims;
    vol.spacing = header.spacing;
    vol.affine = header.affine;
    vol.labels.resize(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double v = samples[i];
        const double r = std::round(v);
        if (std::abs(v - r) > 1e-6 || r < 0)
            throw InvalidArgumentError("sample " + std::to_string(v) +
                                       " is not a nonnegative integer label");
        vol.labels[i] = static_cast<std::int32_t>(r);
    }
    vol.label_map = std::move(label_map);
    for (std::int32_t l : vol.labels)
        if (l != 0 && !vol.label_map.count(l)) vol.label_map[l] = "label_" + std::to_string(l);
    return vol;
}

inline ScalarVolume to_scalar_volume(const VolumeHeader& header, std::vector<double> samples) {
    ScalarVolume vol;
    vol.dims = header.dims;
    vol.spacing = header.spacing;
    vol.affine = header.affine;
    vol.channels = header.effective_channels();
    vol.values = std::move(samples);
    return vol;
}

inline LabelVolume read_label_volume(const std::string& path, LabelMap label_map = {}) {
    auto [header, samples] = read_volume(path);
    return to_label_volume(header, samples, std::move(label_map));
}

inline ScalarVolume read_scalar_volume(const std::string& path) {
    auto [header, samples] = read_volume(path);
    return to_scalar_volume(header, std::move(samples));
}

inline BrainMask read_brain_mask(const std::string& path) {
    auto [header, samples] = read_volume(path);
    if (header.effective_channels() != 1)
        throw UnsupportedDimensionError("brain mask must be single-channel");
    BrainMask m;
    m.dims = header.dims;
    m.spacing = header.spacing;
    m.affine = header.affine;
    m.inside.resize(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) m.inside[i] = samples[i] != 0.0 ? 1u : 0u;
    return m;
}

inline VolumeHeader header_for(const LabelVolume& vol, DatumKind kind) {
    VolumeHeader h;
    h.dims = vol.dims;
    h.spacing = vol.spacing;
    h.affine = vol.affine;
    h.datum_kind = kind;
    h.scale_slope = 1.0;
    h.scale_intercept = 0.0;
    h.channels = 0;
    return h;
}

inline void write_label_volume(const LabelVolume& vol, const std::string& path) {
    std::int32_t max_label = 0;
    for (std::int32_t l : vol.labels) max_label = std::max(max_label, l);
    DatumKind kind = max_label <= 255      ? DatumKind::UInt8
                     : max_label <= 32767  ? DatumKind::Int16
                                           : DatumKind::Int32;
    std::vector<double> samples(vol.labels.begin(), vol.labels.end());
    write_volume(header_for(vol, kind), samples, path);
}

inline void write_scalar_volume(const ScalarVolume& vol, const std::string& path,
                                DatumKind kind = DatumKind::Float32) {
    VolumeHeader h;
    h.dims = vol.dims;
    h.spacing = vol.spacing;
    h.affine = vol.affine;
    h.datum_kind = kind;
    h.scale_slope = 1.0;
    h.scale_intercept = 0.0;
    h.channels = vol.channels > 1 ? vol.channels : 0;
    write_volume(h, vol.values, path);
}

inline void write_brain_mask(const BrainMask& mask, const std::string& path) {
    VolumeHeader h;
    h.dims = mask.dims;
    h.spacing = mask.spacing;
    h.affine = mask.affine;
    h.datum_kind = DatumKind::UInt8;
    h.channels = 0;
    std::vector<double> samples(mask.inside.begin(), mask.inside.end());
    write_volume(h, samples, path);
}

}  // namespace lesionbench::nifti
