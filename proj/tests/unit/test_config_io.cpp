#include <doctest.h>

#include <clocale>
#include <locale>
#include <sstream>

#include "lindblad_modes/config.hpp"
#include "lindblad_modes/errors.hpp"
#include "lindblad_modes/io.hpp"

using namespace lindblad;

namespace {

const char* kTwoMode = R"(# comment line
model.tag = two-mode-thermal
model.omega_a = 1.0
model.omega_b = 1.3
model.gamma_a = 0.4
model.gamma_b = 0.2
model.g = 0.3,0.1
model.gamma_c = 0.1
model.nbar = 0.05
truncation.dim = 6
initial.kind = product
initial.a.kind = coherent
initial.a.alpha = 0.4,-0.2
initial.b.kind = thermal
initial.b.nbar0 = 0.1
grid.t1 = 4
grid.steps = 9
method = eigenmode
output.observables = trace,purity,mean_n
seed = 7
)";

ErrorCode code_of(const std::string& text) {
    try {
        (void)parse_config_text(text);
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::InvalidArgument;
}

} // namespace

TEST_SUITE("config_io") {

TEST_CASE("parse a two-mode config") {
    const RunConfig c = parse_config_text(kTwoMode);
    CHECK(c.model.tag == ModelTag::TwoModeThermal);
    CHECK(c.model.g == Complex(0.3, 0.1));
    CHECK(c.model.dim == 6);
    CHECK(c.initial.kind == StateSpec::Kind::Product);
    CHECK(c.initial.factors[0].alpha == Complex(0.4, -0.2));
    CHECK(c.initial.factors[1].nbar0 == 0.1);
    CHECK(c.grid.steps == 9);
    CHECK(c.observables == std::vector<std::string>{"trace", "purity", "mean_n"});
    CHECK(c.seed == 7);
}

TEST_CASE("round trip is idempotent") {
    const std::string once = serialize(parse_config_text(kTwoMode));
    const std::string twice = serialize(parse_config_text(once));
    CHECK(once == twice);
    const std::string single = serialize(parse_config_text("model.tag = single-zero-T\ninitial.kind = fock\ninitial.n = 2\n"));
    CHECK(single == serialize(parse_config_text(single)));
    CHECK(single.find("model.omega_a") == std::string::npos);
}

TEST_CASE("parse errors") {
    CHECK(code_of("model.tag = single-zero-T\nmodel.omgea = 1\n") == ErrorCode::Parse);
    CHECK(code_of("model.tag = single-zero-T\nmodel.tag = single-zero-T\n") == ErrorCode::Parse);
    CHECK(code_of("model.tag = nonsense\n") == ErrorCode::Parse);
    CHECK(code_of("model.gamma = abc\n") == ErrorCode::Parse);
    CHECK(code_of("no equals sign\n") == ErrorCode::Parse);
    CHECK(code_of("model.gamma = -1\n") == ErrorCode::Parse);
    CHECK(code_of("grid.steps = 0\n") == ErrorCode::Parse);
    CHECK(code_of("initial.kind = explicit\ninitial.path = /nonexistent/file.mat\n") == ErrorCode::Parse);
    CHECK(code_of("model.tag = single-thermal\nmodel.nbar = 0.1\ninitial.kind = fock\nmethod = closed-form\n") ==
          ErrorCode::Parse);
    CHECK(code_of("model.tag = two-mode-zero-T\ninitial.kind = fock\n") == ErrorCode::Parse);
    CHECK(code_of("output.observables = bogus\n") == ErrorCode::Parse);
    CHECK(code_of("truncation.pad = -1\n") == ErrorCode::Parse);
    CHECK(code_of("truncation.strict = maybe\n") == ErrorCode::Parse);
}

TEST_CASE("key values and booleans") {
    std::istringstream in("a.b = 1 # trailing\n\n  c = x y \n");
    const auto kv = parse_key_values(in);
    CHECK(kv.at("a.b") == "1");
    CHECK(kv.at("c") == "x y");
    CHECK(parse_config_text("truncation.strict = yes\n").strict);
    CHECK_FALSE(parse_config_text("truncation.strict = 0\n").strict);
    CHECK(parse_method("closed-form") == Method::ClosedForm);
    CHECK(to_string(Method::All) == "all");
}

TEST_CASE("format_double round trips") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0}) CHECK(std::stod(format_double(v)) == v);
    CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("csv is locale independent") {
    ObservableTable t;
    t.times = {0.0, 0.5};
    t.names = {"trace", "purity"};
    t.is_complex = {true, false};
    t.rows = {{Complex(1.0, 0.0), Complex(1.0)}, {Complex(1.0, 1e-17), Complex(0.75)}};
    const auto render = [&t]() {
        std::ostringstream out;
        write_csv(out, t);
        return out.str();
    };
    const std::string plain = render();
    CHECK(plain.substr(0, plain.find('\n')) == "t,trace_re,trace_im,purity");
    CHECK(plain.find("0.5,1,1e-17,0.75") != std::string::npos);
    // a comma decimal locale must not change the output
    const char* old = std::setlocale(LC_ALL, nullptr);
    const std::string saved = old ? old : "C";
    if (std::setlocale(LC_ALL, "de_DE.UTF-8") || std::setlocale(LC_ALL, "fr_FR.UTF-8")) {
        CHECK(render() == plain);
        std::setlocale(LC_ALL, saved.c_str());
    }
    std::ostringstream imbued;
    try {
        imbued.imbue(std::locale("de_DE.UTF-8"));
    } catch (const std::exception&) {
    }
    write_csv(imbued, t);
    CHECK(imbued.str() == plain);
}

TEST_CASE("state dump format") {
    EvolutionResult r;
    r.times = {0.0, 1.0};
    r.states = {fock_ket_bra(0, 0, 2), fock_ket_bra(1, 1, 2)};
    std::ostringstream out;
    write_state_dump(out, r);
    std::istringstream in(out.str());
    std::string line;
    int entries = 0, blanks = 0;
    while (std::getline(in, line)) {
        if (line.empty()) {
            ++blanks;
            continue;
        }
        std::istringstream ls(line);
        double t, re, im;
        int i, j;
        REQUIRE(static_cast<bool>(ls >> t >> i >> j >> re >> im));
        ++entries;
    }
    CHECK(entries == 8);
    CHECK(blanks == 1);
}

}
