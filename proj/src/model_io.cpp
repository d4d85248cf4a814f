#include "cgem/model_io.hpp"

#include <array>

#include "cgem/binio.hpp"

namespace cgem::io {

namespace {
constexpr std::array<char, 4> k_magic = {'C', 'G', 'M', '1'};
}

void save_model(const std::string& path, const seq::EmulatorModel& model,
                const ArtifactInfo& info) {
    const seq::ModelArch& arch = model.arch();
    BinWriter w(path);
    w.bytes(k_magic.data(), k_magic.size());
    w.u32(info.version);
    w.u64(info.config_hash);
    w.u8(static_cast<std::uint8_t>(info.system));
    w.u8(static_cast<std::uint8_t>(info.mode));
    w.u64(info.seed);
    w.u32(info.best_epoch);
    w.f64(info.best_val_ll);

    w.u32(static_cast<std::uint32_t>(arch.d));
    w.u32(static_cast<std::uint32_t>(arch.m));
    w.u32(static_cast<std::uint32_t>(arch.hidden));
    w.u32(static_cast<std::uint32_t>(arch.hx_width));
    w.u32(static_cast<std::uint32_t>(arch.hy_width));
    w.f64(arch.dropout_rate);

    const auto& s = model.standardizer;
    require(s.x_mean.size() == arch.d && s.y_mean.size() == arch.dm(),
            "save_model: standardizer shape mismatch");
    w.f64_array(s.x_mean.data(), s.x_mean.size());
    w.f64_array(s.x_scale.data(), s.x_scale.size());
    w.f64_array(s.y_mean.data(), s.y_mean.size());
    w.f64_array(s.y_scale.data(), s.y_scale.size());

    const auto& params = model.params().params();
    w.u32(static_cast<std::uint32_t>(params.size()));
    for (const nn::Param& p : params) {
        w.str(p.name);
        w.u32(static_cast<std::uint32_t>(p.value.rows));
        w.u32(static_cast<std::uint32_t>(p.value.cols));
        w.u8(p.trainable ? 1 : 0);
        w.f64_array(p.value.data.data(), p.value.size());
    }
    w.write_trailer();
}

LoadedModel load_model(const std::string& path) {
    BinReader r(path);
    std::array<char, 4> magic{};
    r.bytes(magic.data(), magic.size());
    if (magic != k_magic) throw std::runtime_error("not a model artifact: " + path);

    ArtifactInfo info;
    info.version = r.u32();
    if (info.version != 1)
        throw std::runtime_error("unsupported artifact version " + std::to_string(info.version) +
                                 " in " + path);
    info.config_hash = r.u64();
    info.system = static_cast<dynsys::SystemTag>(r.u8());
    info.mode = static_cast<train::TrainMode>(r.u8());
    info.seed = r.u64();
    info.best_epoch = r.u32();
    info.best_val_ll = r.f64();

    seq::ModelArch arch;
    arch.d = r.u32();
    arch.m = r.u32();
    arch.hidden = r.u32();
    arch.hx_width = r.u32();
    arch.hy_width = r.u32();
    arch.dropout_rate = r.f64();

    seq::EmulatorModel model(arch, 0);
    auto& s = model.standardizer;
    r.f64_array(s.x_mean.data(), s.x_mean.size());
    r.f64_array(s.x_scale.data(), s.x_scale.size());
    r.f64_array(s.y_mean.data(), s.y_mean.size());
    r.f64_array(s.y_scale.data(), s.y_scale.size());

    const std::uint32_t n_tensors = r.u32();
    auto& params = model.params().params();
    if (n_tensors != params.size())
        throw std::runtime_error("artifact tensor count mismatch in " + path);
    for (nn::Param& p : params) {
        const std::string name = r.str();
        if (name != p.name)
            throw std::runtime_error("artifact tensor order mismatch (" + name + ") in " + path);
        const std::uint32_t rows = r.u32();
        const std::uint32_t cols = r.u32();
        if (rows != p.value.rows || cols != p.value.cols)
            throw std::runtime_error("artifact tensor shape mismatch (" + name + ") in " + path);
        p.trainable = r.u8() != 0;
        r.f64_array(p.value.data.data(), p.value.size());
    }
    r.verify_trailer();
    return {info, std::move(model)};
}

}  // namespace cgem::io
