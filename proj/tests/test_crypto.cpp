#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <string>

#include "bitml/crypto.hpp"
#include "doctest.h"

using namespace bitml;

namespace {
Bytes ascii(const std::string& s) { return Bytes(s.begin(), s.end()); }
}  // namespace

TEST_CASE("sha256 matches published vectors") {
  CHECK(to_hex(sha256(ascii(""))) ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(to_hex(sha256(ascii("abc"))) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(to_hex(sha256(ascii(
            "abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq"))) ==
        "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
  // one-million-a vector exercises multi-block padding
  Bytes big(1000000, 'a');
  CHECK(to_hex(sha256(big)) ==
        "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0");
}

TEST_CASE("sha256d is sha256 applied twice") {
  Bytes msg = ascii("hello");
  auto once = sha256(msg);
  auto expected = sha256(once);
  CHECK(sha256d(msg) == expected);
  // independent vector: double-sha256 of "hello"
  CHECK(to_hex(sha256d(msg)) ==
        "9595c9df90075148eb06860365df33584b75bff782a510c6cd4883a419833d50");
}

TEST_CASE("ripemd160 matches published vectors") {
  CHECK(to_hex(ripemd160(ascii(""))) ==
        "9c1185a5c5e9fc54612808977ee8f548b2258d31");
  CHECK(to_hex(ripemd160(ascii("abc"))) ==
        "8eb208f7e05d987a9b044a8e98c6b087f15a0bfc");
  CHECK(to_hex(ripemd160(ascii("message digest"))) ==
        "5d0689ef49d2fae572b881b123a85ffa21595f36");
}

TEST_CASE("hash160 is ripemd160 of sha256") {
  Bytes msg = ascii("bitml");
  auto inner = sha256(msg);
  CHECK(hash160(msg) == ripemd160(inner));
}

TEST_CASE("hex round trip") {
  Bytes data{0x00, 0x01, 0xab, 0xff, 0x80};
  CHECK(to_hex(data) == "0001abff80");
  CHECK(from_hex("0001abff80") == data);
  CHECK(from_hex("0001ABFF80") == data);  // case-insensitive
  CHECK(from_hex("").empty());
}

TEST_CASE("from_hex rejects malformed input") {
  CHECK_THROWS_AS(from_hex("abc"), std::invalid_argument);   // odd length
  CHECK_THROWS_AS(from_hex("zz"), std::invalid_argument);    // non-hex
  CHECK_THROWS_AS(from_hex("0g"), std::invalid_argument);
}
