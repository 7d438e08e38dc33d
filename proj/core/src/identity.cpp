#include "dwpt/identity.hpp"

#include <json.hpp>

#include <algorithm>
#include <stdexcept>

namespace dwpt {

namespace {
using nlohmann::json;

Bytes alpha32(std::uint64_t alpha) {
    Bytes out(32, 0);
    const Bytes tail = be64(alpha);
    std::copy(tail.begin(), tail.end(), out.begin() + 24);
    return out;
}
}  // namespace

VehicleSecrets VehicleSecrets::random(DeterministicRng& rng) {
    VehicleSecrets s;
    s.real_id = rng.next_digest();
    s.k_v = rng.next_digest();
    s.k_sym = rng.next_digest();
    s.c_v = 1 + rng.next_below(1u << 20);
    s.inc_v = 1 + rng.next_below(1u << 20);
    return s;
}

Bytes PseudonymRecord::signed_payload() const {
    return cat({ByteView{enc_alpha}, ByteView{enc_alpha_xor_id}, ByteView{be64(n_i)}});
}

Bytes PseudonymRecord::canonical_encoding() const {
    Bytes out = signed_payload();
    out.insert(out.end(), dmv_signature.begin(), dmv_signature.end());
    return out;
}

PseudonymHandle handle_of(const PseudonymRecord& record) {
    return PseudonymHandle{hash(HashDomain::H, ByteView{record.canonical_encoding()})};
}

Dmv::Dmv(DeterministicRng rng) : rng_(std::move(rng)), keypair_(signing_keygen(rng_)) {}

Credentials Dmv::register_vehicle(const VehicleSecrets& secrets, std::uint64_t count) {
    if (count == 0) throw std::invalid_argument("register_vehicle: count must be >= 1");
    if (secrets.c_v == 0 || secrets.inc_v == 0)
        throw std::invalid_argument("register_vehicle: c_v and inc_v must be positive");

    Credentials creds;
    creds.records.reserve(count);
    creds.handles.reserve(count);

    Bytes handle_cat;
    for (std::uint64_t n_i = 1; n_i <= count; ++n_i) {
        PseudonymRecord rec;
        rec.n_i = n_i;
        rec.alpha = secrets.c_v + n_i * secrets.inc_v;

        const Bytes alpha_bytes = alpha32(rec.alpha);
        rec.enc_alpha = sym_encrypt(secrets.k_sym, alpha_bytes);

        Bytes alpha_xor_id = alpha_bytes;
        for (std::size_t i = 0; i < 32; ++i) alpha_xor_id[i] ^= secrets.real_id.bytes[i];
        rec.enc_alpha_xor_id = sym_encrypt(secrets.k_v, alpha_xor_id);

        rec.dmv_signature = sign_message(keypair_.secret, rec.signed_payload());

        const PseudonymHandle h = handle_of(rec);
        handle_cat.insert(handle_cat.end(), h.handle.bytes.begin(), h.handle.bytes.end());
        creds.records.push_back(std::move(rec));
        creds.handles.push_back(h);
    }

    creds.x_obu_static = hash(HashDomain::H, ByteView{handle_cat});
    creds.pwd_obu = rng_.next_digest();
    return creds;
}

bool verify_record(const Bytes& dmv_public_key, const PseudonymRecord& record) {
    return verify_message(dmv_public_key, record.signed_payload(), record.dmv_signature);
}

Digest32 x_obu_dynamic(const PseudonymHandle& ps) { return hash(HashDomain::H2, ps.handle); }

Digest32 build_chain_anchor(const PseudonymHandle& ps, const Digest32& n_obu,
                            std::uint64_t length) {
    if (length == 0) throw std::invalid_argument("chain anchor length must be >= 1");
    return hash_iter(HashDomain::H, ByteView{cat(n_obu.view(), ps.handle.view())}, length);
}

void provision_chains(Credentials& credentials, std::uint64_t length) {
    if (length == 0) throw std::invalid_argument("chain length must be >= 1");
    credentials.chain_anchors.clear();
    credentials.chain_anchors.reserve(credentials.handles.size());
    for (const auto& h : credentials.handles)
        credentials.chain_anchors.push_back(hash_iter(HashDomain::H, h.handle.view(), length));
    credentials.chain_length = length;
}

bool CspaPseudonymDb::contains(const Digest32& h) const {
    return std::find(valid_.begin(), valid_.end(), h) != valid_.end();
}

CspaPseudonymDb sync_cspa_db(const std::vector<Credentials>& all_credentials,
                             DeterministicRng& rng) {
    CspaPseudonymDb db;
    for (const auto& creds : all_credentials)
        for (const auto& h : creds.handles) db.insert(h);
    // Fisher-Yates under the run's seeded generator.
    for (std::size_t i = db.valid_.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(db.valid_[i - 1], db.valid_[j]);
    }
    return db;
}

namespace {
json record_to_json(const PseudonymRecord& r) {
    return json{{"n_i", r.n_i},
                {"alpha", r.alpha},
                {"enc_alpha", to_hex(ByteView{r.enc_alpha})},
                {"enc_alpha_xor_id", to_hex(ByteView{r.enc_alpha_xor_id})},
                {"dmv_signature", to_hex(ByteView{r.dmv_signature})}};
}

PseudonymRecord record_from_json(const json& j) {
    PseudonymRecord r;
    r.n_i = j.at("n_i").get<std::uint64_t>();
    r.alpha = j.at("alpha").get<std::uint64_t>();
    r.enc_alpha = from_hex(j.at("enc_alpha").get<std::string>());
    r.enc_alpha_xor_id = from_hex(j.at("enc_alpha_xor_id").get<std::string>());
    r.dmv_signature = from_hex(j.at("dmv_signature").get<std::string>());
    return r;
}
}  // namespace

std::string Credentials::to_json() const {
    json j;
    j["records"] = json::array();
    for (const auto& r : records) j["records"].push_back(record_to_json(r));
    j["handles"] = json::array();
    for (const auto& h : handles) j["handles"].push_back(to_hex(h.handle));
    j["x_obu_static"] = to_hex(x_obu_static);
    j["pwd_obu"] = to_hex(pwd_obu);
    j["chain_anchors"] = json::array();
    for (const auto& a : chain_anchors) j["chain_anchors"].push_back(to_hex(a));
    j["chain_length"] = chain_length;
    return j.dump();
}

Credentials Credentials::from_json(const std::string& text) {
    const json j = json::parse(text);
    Credentials c;
    for (const auto& rj : j.at("records")) c.records.push_back(record_from_json(rj));
    for (const auto& hj : j.at("handles"))
        c.handles.push_back(PseudonymHandle{digest_from_hex(hj.get<std::string>())});
    c.x_obu_static = digest_from_hex(j.at("x_obu_static").get<std::string>());
    c.pwd_obu = digest_from_hex(j.at("pwd_obu").get<std::string>());
    for (const auto& aj : j.at("chain_anchors"))
        c.chain_anchors.push_back(digest_from_hex(aj.get<std::string>()));
    c.chain_length = j.at("chain_length").get<std::uint64_t>();
    return c;
}

std::string CspaPseudonymDb::to_json() const {
    json j;
    j["valid"] = json::array();
    for (const auto& h : valid_) j["valid"].push_back(to_hex(h));
    j["spent"] = json::array();
    for (const auto& h : spent_) j["spent"].push_back(to_hex(h));
    return j.dump();
}

CspaPseudonymDb CspaPseudonymDb::from_json(const std::string& text) {
    const json j = json::parse(text);
    CspaPseudonymDb db;
    for (const auto& hj : j.at("valid"))
        db.insert(PseudonymHandle{digest_from_hex(hj.get<std::string>())});
    for (const auto& hj : j.at("spent")) db.mark_spent(digest_from_hex(hj.get<std::string>()));
    return db;
}

}  // namespace dwpt
