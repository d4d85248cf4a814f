#include "cgem/dataset_io.hpp"

#include <array>
#include <filesystem>

#include "cgem/binio.hpp"

namespace cgem::io {

namespace {
constexpr std::array<char, 4> k_magic = {'C', 'G', 'D', '1'};
}

void save_dataset(const std::string& path, const DatasetHeader& header,
                  const coarse::Standardizer& standardizer, const Matrix& x, const Matrix& y) {
    const std::size_t d = header.d;
    const std::size_t dm = static_cast<std::size_t>(header.d) * header.m;
    require(x.rows == header.length && x.cols == d, "save_dataset: X shape mismatch");
    require(y.rows == header.length && y.cols == dm, "save_dataset: Y shape mismatch");
    require(standardizer.x_mean.size() == d && standardizer.y_mean.size() == dm,
            "save_dataset: standardizer shape mismatch");

    BinWriter w(path);
    w.bytes(k_magic.data(), k_magic.size());
    w.u32(header.version);
    w.u64(header.config_hash);
    w.u8(static_cast<std::uint8_t>(header.system));
    w.u8(header.split);
    w.f64(header.dt_coarse);
    w.u32(header.length);
    w.u32(header.d);
    w.u32(header.m);
    w.f64_array(standardizer.x_mean.data(), d);
    w.f64_array(standardizer.x_scale.data(), d);
    w.f64_array(standardizer.y_mean.data(), dm);
    w.f64_array(standardizer.y_scale.data(), dm);
    w.f64_array(x.data.data(), x.size());
    w.f64_array(y.data.data(), y.size());
    w.write_trailer();
}

LoadedDataset load_dataset(const std::string& path, bool load_y) {
    BinReader r(path);
    std::array<char, 4> magic{};
    r.bytes(magic.data(), magic.size());
    if (magic != k_magic) throw std::runtime_error("not a dataset file: " + path);

    LoadedDataset out;
    out.header.version = r.u32();
    if (out.header.version != 1)
        throw std::runtime_error("unsupported dataset version " +
                                 std::to_string(out.header.version) + " in " + path);
    out.header.config_hash = r.u64();
    out.header.system = static_cast<dynsys::SystemTag>(r.u8());
    out.header.split = r.u8();
    out.header.dt_coarse = r.f64();
    out.header.length = r.u32();
    out.header.d = r.u32();
    out.header.m = r.u32();

    const std::size_t d = out.header.d;
    const std::size_t dm = static_cast<std::size_t>(out.header.d) * out.header.m;
    const std::size_t t = out.header.length;

    auto& s = out.standardizer;
    s.x_mean.resize(d);
    s.x_scale.resize(d);
    s.y_mean.resize(dm);
    s.y_scale.resize(dm);
    r.f64_array(s.x_mean.data(), d);
    r.f64_array(s.x_scale.data(), d);
    r.f64_array(s.y_mean.data(), dm);
    r.f64_array(s.y_scale.data(), dm);

    Matrix x(t, d);
    r.f64_array(x.data.data(), x.size());
    if (load_y) {
        Matrix y(t, dm);
        r.f64_array(y.data.data(), y.size());
        out.data = train::SplitData(std::move(x), std::move(y));
    } else {
        r.skip_through_crc(t * dm * sizeof(double));
        out.data = train::SplitData(std::move(x));
    }
    r.verify_trailer();
    return out;
}

std::uint64_t file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    std::vector<char> buf(1 << 20);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        const std::size_t n = static_cast<std::size_t>(in.gcount());
        for (std::size_t i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

}  // namespace cgem::io
