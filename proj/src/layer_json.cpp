#include "rbfnet/layer_json.hpp"

#include "rbfnet/errors.hpp"

namespace rbfnet {

using nlohmann::json;

json layer_to_json(const LayerSpec& spec) {
    json j{{"kind", layer_kind_name(spec.kind)}};
    switch (spec.kind) {
        case LayerKind::Conv2d:
            j["out"] = spec.out_channels;
            j["kh"] = spec.kernel_h;
            j["kw"] = spec.kernel_w;
            j["stride"] = spec.stride;
            j["pad"] = spec.pad;
            break;
        case LayerKind::Dense:
            j["units"] = spec.units;
            break;
        case LayerKind::ResidualBlock:
            j["out"] = spec.out_channels;
            j["stride"] = spec.stride;
            break;
        default:
            break;
    }
    return j;
}

LayerSpec layer_from_json(const json& j) {
    try {
        const LayerKind kind = layer_kind_from_name(j.at("kind").get<std::string>());
        switch (kind) {
            case LayerKind::Conv2d:
                return LayerSpec::conv(
                    j.at("out").get<std::size_t>(), j.at("kh").get<std::size_t>(),
                    j.at("kw").get<std::size_t>(), j.value("stride", std::size_t{1}),
                    j.value("pad", std::size_t{0}));
            case LayerKind::Dense:
                return LayerSpec::dense(j.at("units").get<std::size_t>());
            case LayerKind::Tanh:
                return LayerSpec::tanh();
            case LayerKind::Relu:
                return LayerSpec::relu();
            case LayerKind::ResidualBlock:
                return LayerSpec::residual(j.at("out").get<std::size_t>(),
                                           j.value("stride", std::size_t{1}));
            case LayerKind::Flatten:
                return LayerSpec::flatten();
        }
    } catch (const json::exception& e) {
        throw InputError("bad layer description: " + std::string(e.what()));
    }
    throw InputError("unreachable layer kind");
}

}  // namespace rbfnet
