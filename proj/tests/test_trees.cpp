#include "fairscheme/trees.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace fairscheme;
using test::compile_source;

namespace {

const char* kZipProgram =
    "data List a = Nil | Cons a (List a)\n"
    "data Pair a b = Pair a b\n"
    "zip [] _ = []\n"
    "zip (_:_) [] = []\n"
    "zip (x:xs) (y:ys) = (x,y) : zip xs ys\n"
    "main = zip [1] [2]\n";

std::string compile_error(const std::string& src) {
    try {
        compile_source(src);
    } catch (const CompileError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("reserved and constructor tags") {
    IRProgram ir = compile_source("data Color = Red | Green | Blue\nmain = Green\n");
    CHECK(ir.find("?")->tag == kChoiceTag);
    CHECK(ir.find("failed")->tag == kFailureTag);
    CHECK(ir.find("main")->tag == kFunctionTag);
    CHECK(ir.find("head")->tag == kFunctionTag);
    CHECK(ir.find("Nil")->tag.value == 3);
    CHECK(ir.find("Cons")->tag.value == 4);
    CHECK(ir.find("False")->tag.value == 3);
    CHECK(ir.find("True")->tag.value == 4);
    CHECK(ir.find("Red")->tag.value == 3);
    CHECK(ir.find("Green")->tag.value == 4);
    CHECK(ir.find("Blue")->tag.value == 5);
    CHECK(ir.find("Blue")->type->name == "Color");
    CHECK(ir.find("Blue")->constructor_index == 2);
}

TEST_CASE("recompiling gives the same tags") {
    IRProgram a = compile_source("data T = A | B\nmain = A\n");
    IRProgram b = compile_source("data T = A | B\nmain = A\n");
    REQUIRE(a.symbols().size() == b.symbols().size());
    for (std::size_t i = 0; i < a.symbols().size(); ++i) {
        CHECK(a.symbols()[i]->name == b.symbols()[i]->name);
        CHECK(a.symbols()[i]->tag == b.symbols()[i]->tag);
    }
}

TEST_CASE("zip has a two-level branch tree") {
    IRProgram ir = compile_source(kZipProgram, true);
    const DefTree& t = ir.find("zip")->tree;
    REQUIRE(t.kind == DefTree::Kind::Branch);
    CHECK(format_path(t.position) == "@1");
    REQUIRE(t.children.size() == 2);
    CHECK(t.children[0].kind == DefTree::Kind::Leaf);
    CHECK(t.children[0].rule == 0);
    const DefTree& inner = t.children[1];
    REQUIRE(inner.kind == DefTree::Kind::Branch);
    CHECK(format_path(inner.position) == "@2");
    CHECK(inner.children[0].rule == 1);
    CHECK(inner.children[1].rule == 2);
    REQUIRE(inner.children[1].bindings.size() == 4);
    CHECK(inner.children[1].bindings[0].first == "x");
    CHECK(format_path(inner.children[1].bindings[0].second) == "@1.1");
}

TEST_CASE("zip dtree and icurry dumps") {
    IRProgram ir = compile_source(kZipProgram, true);
    CHECK(dump_dtree(ir) ==
          "function zip/2\n"
          "  branch @1 List {\n"
          "    Nil -> leaf []\n"
          "    Cons -> branch @2 List {\n"
          "      Nil -> leaf []\n"
          "      Cons -> leaf (x,y) : zip xs ys\n"
          "    }\n"
          "  }\n"
          "function main/0\n"
          "  leaf zip [1] [2]\n");
    std::string icurry = dump_icurry(ir);
    CHECK(icurry.rfind("reserved tags: function=0 choice=1 failure=2\n", 0) == 0);
    CHECK(icurry.find("  Nil arity=0 tag=3 kind=constructor type=List index=0\n") != std::string::npos);
    CHECK(icurry.find("  Cons arity=2 tag=4 kind=constructor type=List index=1\n") != std::string::npos);
    CHECK(icurry.find(
              "functions:\n"
              "  zip/2 entry=table#1\n"
              "    table#0 @2 List [5]: 0:eval 1:pulltab 2:fail 3:leaf#1 4:leaf#2\n"
              "    table#1 @1 List [5]: 0:eval 1:pulltab 2:fail 3:leaf#0 4:table#0\n"
              "    leaf#0 rule 1: []\n"
              "    leaf#1 rule 2: []\n"
              "    leaf#2 rule 3: (x,y) : zip xs ys\n") != std::string::npos);
}

TEST_CASE("case tables are dense over the tag range") {
    IRProgram ir = compile_source("data C = R | G | B\nw R = 1\nw G = 2\nmain = w R\n");
    const CompiledFunction& code = ir.find("w")->code;
    REQUIRE(code.tables.size() == 1);
    const CaseTable& t = code.tables[0];
    REQUIRE(t.entries.size() == 6);
    CHECK(t.entries[kFunctionTag.value].kind == Target::Kind::Eval);
    CHECK(t.entries[kChoiceTag.value].kind == Target::Kind::PullTab);
    CHECK(t.entries[kFailureTag.value].kind == Target::Kind::Fail);
    CHECK(t.entries[3].kind == Target::Kind::Leaf);
    CHECK(t.entries[4].kind == Target::Kind::Leaf);
    CHECK(t.entries[5].kind == Target::Kind::Exempt);
}

TEST_CASE("integer patterns dispatch with an exempt default") {
    IRProgram ir = compile_source("f 0 = 1\nf 2 = 3\nmain = f 2\n");
    const CaseTable& t = ir.find("f")->code.tables.at(0);
    CHECK(t.type == ir.integer().type);
    REQUIRE(t.entries.size() == 4);
    CHECK(t.entries[3].kind == Target::Kind::IntDispatch);
    REQUIRE(t.int_cases.size() == 2);
    CHECK(t.int_cases[0].first == 0);
    CHECK(t.int_cases[1].first == 2);
    CHECK(dump_dtree(ir).find("    _ -> exempt\n") != std::string::npos);
}

TEST_CASE("overlapping rules become an Or with an auxiliary function") {
    IRProgram ir = compile_source("data ABC = A | B | C\nf _ = 0\nf A = 1\nf B = 2\nmain = f A\n");
    const InfoEntry* f = ir.find("f");
    REQUIRE(f->tree.kind == DefTree::Kind::Or);
    REQUIRE(f->tree.aux.size() == 2);
    CHECK(f->tree.aux[0] == nullptr);
    REQUIRE(f->tree.aux[1] != nullptr);
    CHECK(f->tree.aux[1]->name == "f#1");
    CHECK(f->tree.aux[1]->auxiliary);
    CHECK(dump_dtree(ir).find("function f/1\n  or {\n    leaf 0\n    call f#1\n  }\n") != std::string::npos);
    CHECK(dump_dtree(ir).find("function f#1/1 (auxiliary)\n  branch @1 ABC {\n    A -> leaf 1\n    B -> leaf 2\n    C -> exempt\n") !=
          std::string::npos);
}

TEST_CASE("overlap below a branch keeps the matched prefix") {
    IRProgram ir = compile_source(
        "data ABC = A | B | C\n"
        "h A A = 1\nh A _ = 2\nh B x = x\nmain = h A A\n");
    const DefTree& t = ir.find("h")->tree;
    REQUIRE(t.kind == DefTree::Kind::Branch);
    const DefTree& a = t.children[0];
    CHECK(a.kind == DefTree::Kind::Or);
    REQUIRE(a.context.size() == 1);
    CHECK(a.context[0].case_index == 0);
    CHECK(t.children[2].kind == DefTree::Kind::Exempt);
    const InfoEntry* aux = a.aux[0] != nullptr ? a.aux[0] : a.aux[1];
    REQUIRE(aux != nullptr);
    // The auxiliary re-matches @1 = A before its own subtree.
    CHECK(aux->tree.kind == DefTree::Kind::Branch);
    CHECK(aux->tree.children[1].kind == DefTree::Kind::Exempt);
}

TEST_CASE("parallel or is rejected") {
    std::string e = compile_error("data B = T | F\npor T _ = T\npor _ T = T\npor F F = F\nmain = por T F\n");
    CHECK(e.find("inductively sequential") != std::string::npos);
    CHECK(e.find("por") != std::string::npos);
}

TEST_CASE("mixing integer and constructor patterns is rejected") {
    CHECK(compile_error("f 0 = 1\nf True = 2\nmain = f 0\n") != "");
}

TEST_CASE("partial applications get one entry per held count") {
    IRProgram ir = compile_source("add3 a b c = a + b + c\nmain = map (add3 1) [3]\n");
    const InfoEntry* add3 = ir.find("add3");
    const InfoEntry* p1 = ir.partial(*add3, 1);
    const InfoEntry* p2 = ir.partial(*add3, 2);
    REQUIRE(p1 != nullptr);
    REQUIRE(p2 != nullptr);
    CHECK(p1->kind == SymbolKind::Partial);
    CHECK(p1->missing == 2);
    CHECK(p2->missing == 1);
    CHECK(p1->partial_next == p2);
    CHECK(p2->partial_target == add3);
    CHECK(p2->arity == 2);
    CHECK(ir.partial(*add3, 0) == nullptr);
}

TEST_CASE("templates share a where-bound node") {
    IRProgram ir = compile_source("data TF = T | F\nmain = (x, x) where x = T ? F\n");
    const LeafCode& leaf = ir.goal().code.leaves.at(0);
    int choices = 0;
    for (const auto& op : leaf.rhs.ops) {
        choices += op.code == TemplateOp::Code::Choice ? 1 : 0;
    }
    CHECK(choices == 1);
    const TemplateOp& root = leaf.rhs.ops[leaf.rhs.root];
    REQUIRE(root.operands.size() == 2);
    CHECK(root.operands[0] == root.operands[1]);
}

TEST_CASE("prelude functions are hidden from dumps unless asked for") {
    IRProgram ir = compile_source("main = head [1]\n");
    CHECK(dump_icurry(ir).find("  head/1 entry=") == std::string::npos);
    CHECK(dump_icurry(ir, true).find("  head/1 entry=") != std::string::npos);
    CHECK(dump_icurry(ir).find("  head arity=1 tag=0 kind=function\n") != std::string::npos);
}
