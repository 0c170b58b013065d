#include "rbfnet/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "rbfnet/errors.hpp"
#include "rbfnet/layer_json.hpp"

namespace rbfnet {

using nlohmann::json;

namespace {

void put_u32(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_f64(std::string& out, double d) {
    const std::uint64_t v = std::bit_cast<std::uint64_t>(d);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

double get_f64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return std::bit_cast<double>(v);
}

}  // namespace

void save_checkpoint(const std::string& path, const Model& model) {
    validate_model(model);
    json header;
    header["input_shape"] = model.backbone.input_shape;
    header["layers"] = json::array();
    for (const auto& spec : model.backbone.layers) {
        header["layers"].push_back(layer_to_json(spec));
    }
    if (model.head_kind == HeadKind::Rbf) {
        json h{{"kind", "rbf"},
               {"lambda", model.rbf.lambda},
               {"exponent", model.rbf.exponent},
               {"num_classes", model.rbf.num_classes()},
               {"proto_dim", model.rbf.proto_dim()}};
        if (model.rbf.has_projection()) h["projection_rows"] = model.rbf.projection.dim(0);
        h["has_offset"] = model.rbf.has_offset();
        header["head"] = h;
    } else {
        header["head"] = json{{"kind", "softmax"},
                              {"feature_dim", model.softmax.feature_dim()},
                              {"num_classes", model.softmax.num_classes()}};
    }
    if (model.has_steering) {
        header["steering"] = json{{"max_angle", model.steering.max_angle},
                                  {"num_classes", model.steering.num_classes}};
    }
    const auto params = model_parameters(model);
    std::size_t count = 0;
    for (const Tensor* t : params) count += t->numel();
    header["param_count"] = count;

    const std::string head_str = header.dump();
    std::string out;
    out.reserve(8 + head_str.size() + count * 8);
    out.append("RBCK", 4);
    put_u32(out, static_cast<std::uint32_t>(head_str.size()));
    out.append(head_str);
    for (const Tensor* t : params) {
        for (double d : t->data) put_f64(out, d);
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open '" + path + "' for writing");
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
    file.flush();
    if (!file) throw IoError("write failure on '" + path + "'");
}

Model load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failure on '" + path + "'");
    if (bytes.size() < 8) throw ParseError("truncated header in '" + path + "'");
    if (std::memcmp(bytes.data(), "RBCK", 4) != 0) {
        throw ParseError("bad magic in '" + path + "' (not a checkpoint file)");
    }
    const unsigned char* p = reinterpret_cast<const unsigned char*>(bytes.data()) + 4;
    const std::uint32_t head_len = static_cast<std::uint32_t>(p[0]) |
                                   (static_cast<std::uint32_t>(p[1]) << 8) |
                                   (static_cast<std::uint32_t>(p[2]) << 16) |
                                   (static_cast<std::uint32_t>(p[3]) << 24);
    if (bytes.size() < 8 + static_cast<std::size_t>(head_len)) {
        throw ParseError("truncated header in '" + path + "'");
    }
    json header;
    try {
        header = json::parse(bytes.substr(8, head_len));
    } catch (const json::exception& e) {
        throw ParseError("bad checkpoint header in '" + path + "': " + e.what());
    }

    Model model;
    try {
        const auto input_shape = header.at("input_shape").get<std::vector<std::size_t>>();
        std::vector<LayerSpec> layers;
        for (const auto& lj : header.at("layers")) layers.push_back(layer_from_json(lj));
        model.backbone = make_network(input_shape, std::move(layers));

        const json& h = header.at("head");
        const std::string kind = h.at("kind").get<std::string>();
        if (kind == "rbf") {
            model.head_kind = HeadKind::Rbf;
            model.rbf = make_rbf_head(h.at("num_classes").get<std::size_t>(),
                                      h.at("proto_dim").get<std::size_t>(),
                                      h.at("lambda").get<double>(),
                                      h.at("exponent").get<double>());
            if (h.contains("projection_rows")) {
                model.rbf.projection = Tensor(
                    {h.at("projection_rows").get<std::size_t>(), model.rbf.proto_dim()});
            }
            if (h.value("has_offset", false)) {
                model.rbf.offset = Tensor({model.rbf.proto_dim()});
            }
        } else if (kind == "softmax") {
            model.head_kind = HeadKind::Softmax;
            model.softmax.weight = Tensor({h.at("feature_dim").get<std::size_t>(),
                                           h.at("num_classes").get<std::size_t>()});
            model.softmax.bias = Tensor({h.at("num_classes").get<std::size_t>()});
        } else {
            throw ParseError("unknown head kind '" + kind + "' in '" + path + "'");
        }
        if (header.contains("steering")) {
            model.has_steering = true;
            model.steering.max_angle = header.at("steering").at("max_angle").get<double>();
            model.steering.num_classes =
                header.at("steering").at("num_classes").get<std::size_t>();
        }
        const std::size_t declared = header.at("param_count").get<std::size_t>();
        auto params = model_parameters(model);
        std::size_t count = 0;
        for (const Tensor* t : params) count += t->numel();
        if (declared != count) {
            throw ParseError("checkpoint '" + path + "' declares " + std::to_string(declared) +
                             " parameters, architecture needs " + std::to_string(count));
        }
        const std::size_t blob = bytes.size() - 8 - head_len;
        if (blob < count * 8) throw ParseError("truncated parameter blob in '" + path + "'");
        if (blob > count * 8) throw ParseError("trailing bytes in '" + path + "'");
        const unsigned char* cur =
            reinterpret_cast<const unsigned char*>(bytes.data()) + 8 + head_len;
        std::vector<Tensor*> mut = model_parameters(model);
        for (Tensor* t : mut) {
            for (double& d : t->data) {
                d = get_f64(cur);
                cur += 8;
            }
        }
    } catch (const json::exception& e) {
        throw ParseError("bad checkpoint header in '" + path + "': " + e.what());
    } catch (const InputError& e) {
        throw ParseError("bad checkpoint header in '" + path + "': " + e.what());
    }
    validate_model(model);
    return model;
}

}  // namespace rbfnet
