#include "saslab/io.hpp"

#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <sys/wait.h>

namespace fs = std::filesystem;
using saslab::Json;

namespace {

struct Run {
	int code = -1;
	std::string out;
	Json json() const { return Json::parse(out); }
};

const std::string kData = SASLAB_DATA_DIR;

Run run(const std::string &args)
{
	std::string cmd = std::string(SASLAB_CLI) + " " + args + " 2>/dev/null";
	Run r;
	FILE *p = popen(cmd.c_str(), "r");
	REQUIRE(p);
	std::array<char, 4096> buf;
	std::size_t n;
	while ((n = fread(buf.data(), 1, buf.size(), p)) > 0)
		r.out.append(buf.data(), n);
	int status = pclose(p);
	r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
	return r;
}

fs::path scratch()
{
	fs::path d = fs::temp_directory_path() / "saslab_cli_test";
	fs::create_directories(d);
	return d;
}

std::string write(const std::string &name, const std::string &text)
{
	fs::path p = scratch() / name;
	saslab::write_text_file(p.string(), text);
	return p.string();
}

std::string mult(unsigned a, unsigned b)
{
	std::string out = (scratch() / ("mult" + std::to_string(a) + "x" + std::to_string(b) + ".bench")).string();
	REQUIRE(run("generate multiplier --a-bits " + std::to_string(a) + " --b-bits " + std::to_string(b) + " --out " +
	            out).code == 0);
	return out;
}

// The results payload, re-serialized so that key order and formatting are fixed.
std::string payload(const Run &r)
{
	REQUIRE(r.code == 0);
	return r.json()["results"].dump();
}

} // namespace

TEST_CASE("lock writes the locked circuit, key, and spec echo")
{
	std::string bench = mult(4, 4);
	std::string out = (scratch() / "locked.bench").string(), key = (scratch() / "locked.key").string();
	std::string spec_out = (scratch() / "echo.json").string();
	Run r = run("lock --bench " + bench + " --scheme sas --spec " + kData + "/sas_n4.json --seed 1 --out " + out +
	            " --key-out " + key + " --spec-out " + spec_out);
	REQUIRE(r.code == 0);
	Json j = r.json();
	CHECK(j["results"]["spec"]["m"] == 2);
	CHECK(j["seed"] == 1);
	std::string golden = saslab::read_text_file(kData + "/golden/mult4x4_sas_n4_seed1.bench");
	CHECK(saslab::read_text_file(out) == golden);
	CHECK(saslab::read_text_file(key) == j["results"]["correct_key"].get<std::string>() + "\n");
	Json echo = saslab::parse_json_text(saslab::read_text_file(spec_out));
	CHECK(echo["k1_sets"].size() == 1);
}

TEST_CASE("exit codes")
{
	std::string bench = mult(4, 4);
	CHECK(run("").code == 1);
	CHECK(run("lock --bogus").code == 1);
	CHECK(run("lock --bench " + bench + " --scheme foo --spec " + kData + "/sas_n4.json --seed 1 --out /dev/null").code == 1);
	CHECK(run("lock --bench " + bench + " --scheme sas --spec " + kData + "/sas_n4.json --out /dev/null").code == 1);
	CHECK(run("lock --bench /nonexistent.bench --scheme sas --spec " + kData + "/sas_n4.json --seed 1 --out /dev/null").code == 2);
	std::string bad = write("bad.bench", "INPUT(a)\nOUTPUT(y)\ny = AND(a, b)\n");
	CHECK(run("simulate --bench " + bad + " --inputs 0").code == 2);
	std::string badspec = write("bad.json", R"({"scheme":"sas","n":4,"l":1,"critical_minterms":["3","3"]})");
	CHECK(run("lock --bench " + bench + " --spec " + badspec + " --seed 1 --out /dev/null").code == 3);
	// 26 key bits: no exhaustive IER without --sample.
	std::string big = mult(7, 7);
	std::string locked = (scratch() / "big.bench").string();
	std::string spec = write("n13.json", R"({"scheme":"sas","n":13,"l":1,"critical_minterms":["3","6"]})");
	REQUIRE(run("lock --bench " + big + " --spec " + spec + " --seed 1 --out " + locked).code == 0);
	CHECK(run("metrics ier --bench " + locked + " --oracle " + big + " --spec " + spec + " --seed 1").code == 3);
	Run sampled = run("metrics ier --bench " + locked + " --oracle " + big + " --spec " + spec +
	                  " --seed 1 --sample 200 --minterm 0003");
	CHECK(sampled.code == 0);
}

TEST_CASE("metrics on the two-input example and the closed form")
{
	Run r = run("metrics averages --bench " + kData + "/toy_locked.bench --oracle " + kData + "/toy_original.bench");
	REQUIRE(r.code == 0);
	Json j = r.json()["results"];
	CHECK(j["e_w"].dump() == R"({"num":"2","den":"3"})");
	CHECK(j["gamma"].dump() == R"({"num":"2","den":"3"})");
	Json e = run("metrics expected --n 14 --m 4 --l 1").json()["results"];
	CHECK(e["expected_iterations"].dump() == R"({"num":"8194","den":"1"})");
	Json k = run("metrics ker --bench " + kData + "/toy_locked.bench --oracle " + kData +
	             "/toy_original.bench --key " + kData + "/toy_key.txt").json()["results"];
	CHECK(k["ker"].dump() == R"({"num":"0","den":"1"})");
}

TEST_CASE("attack modes")
{
	std::string bench = mult(4, 4);
	std::string sas = (scratch() / "a_sas.bench").string(), rsas = (scratch() / "a_rsas.bench").string();
	REQUIRE(run("lock --bench " + bench + " --scheme sas --spec " + kData + "/sas_n4.json --seed 2 --out " + sas).code == 0);
	REQUIRE(run("lock --bench " + bench + " --scheme rsas --spec " + kData + "/sas_n4.json --seed 2 --out " + rsas).code == 0);
	Json sat = run("attack sat --bench " + sas + " --oracle " + bench + " --seed 5").json()["results"];
	CHECK(sat["termination"] == "exhausted");
	CHECK(sat["functionally_correct"] == true);
	Json rem = run("attack removal --bench " + rsas + " --oracle " + bench + " --spec " + kData + "/sas_n4.json").json()["results"];
	CHECK(rem["equivalent"] == false);
	CHECK(rem["mismatch_minterms"] == Json::parse(R"(["3","6"])"));
	Json rem_sas = run("attack removal --bench " + sas + " --oracle " + bench + " --spec " + kData + "/sas_n4.json").json()["results"];
	CHECK(rem_sas["equivalent"] == true);
	std::string spec = write("model.json", R"({"scheme":"sas","n":8,"l":1,"critical_minterms":["01","02"]})");
	Json model = run("attack model --spec " + spec + " --seed 3 --trials 2000").json()["results"];
	CHECK(model["formula_mean"].dump() == R"({"num":"129","den":"1"})");
	CHECK(model["within_3se"] == true);
	CHECK(model["tradeoff_bound_holds"] == true);
}

TEST_CASE("workload commands")
{
	Json sel = run("workload select --trace " + kData + "/trace_n4.csv --trace " + kData +
	               "/trace_n4_b.csv --m 2 --width 4").json()["results"];
	CHECK(sel["critical_minterms"] == Json::parse(R"(["3","5"])"));
	CHECK(sel["fallback_to_union"] == false);
	Json fb = run("workload select --trace " + kData + "/trace_n4.csv --trace " + kData +
	              "/trace_n4_b.csv --m 4 --width 4").json()["results"];
	CHECK(fb["fallback_to_union"] == true);
}

TEST_CASE("payloads are identical across runs and thread counts")
{
	std::string bench = mult(4, 4);
	std::string locked = (scratch() / "det.bench").string();
	// lock has no worker pool; repeated runs must still agree.
	CHECK(payload(run("lock --bench " + bench + " --scheme rsas --spec " + kData + "/sas_n4.json --seed 9 --out " + locked)) ==
		payload(run("lock --bench " + bench + " --scheme rsas --spec " + kData + "/sas_n4.json --seed 9 --out " + locked)));
	for (const std::string cmd : {
		     "metrics averages --bench " + locked + " --oracle " + bench + " --spec " + kData + "/sas_n4.json",
		     "metrics ier --bench " + locked + " --oracle " + bench + " --spec " + kData + "/sas_n4.json",
		     "attack model --spec " + kData + "/sas_n4.json --seed 4 --trials 3000",
	     }) {
		std::string one = payload(run(cmd + " --threads 1"));
		CHECK(one == payload(run(cmd + " --threads 4")));
		CHECK(one == payload(run(cmd + " --threads 3")));
	}
	for (const std::string cmd : {
		     "attack sat --bench " + locked + " --oracle " + bench + " --seed 4",
		     "simulate --bench " + locked + " --inputs 1234",
		     "workload select --trace " + kData + "/trace_n14.csv --m 4 --width 14",
		     "generate multiplier --a-bits 3 --b-bits 3 --out " + (scratch() / "g.bench").string(),
	     })
		CHECK(payload(run(cmd)) == payload(run(cmd)));
}
