from pathlib import Path

import networkx as nx
import pandas as pd
import plotly.graph_objects as go
import streamlit as st

from evidence_tools import codec, corpus
from evidence_tools.cases import bpa_from_cases, ingest_cases
from evidence_tools.conditionals import Strategy
from evidence_tools.errors import EvidenceError
from evidence_tools.mass import focal_summary
from evidence_tools.network import EvidenceSet, reorient_for_target, validate_polytree, verify

DATA_DIR = Path(__file__).resolve().parent.parent / "data"
NETWORKS = {
    "逆向き推論 (X → Z, 40/60)": ("reverse_direction.json", "forty_sixty.csv"),
    "m1 チェーン (X → Z)": ("m1_chain.json", None),
}


# --- 計算ロジック関数 ---
def network_chart(net, target, added=()):
    pos = nx.circular_layout(net.graph())
    fig = go.Figure()
    for u, v in net.edges:
        is_added = (u, v) in added
        fig.add_annotation(
            x=pos[v][0], y=pos[v][1], ax=pos[u][0], ay=pos[u][1],
            xref="x", yref="y", axref="x", ayref="y",
            showarrow=True, arrowhead=3, arrowsize=1.5, arrowwidth=2, standoff=18, startstandoff=18,
            arrowcolor="#ff2b2b" if is_added else "#0068c9",
        )
    names = list(net.frame.names)
    fig.add_trace(go.Scatter(
        x=[pos[n][0] for n in names], y=[pos[n][1] for n in names],
        mode="markers+text", text=names, textposition="middle center",
        marker=dict(size=40, color=["#99FF99" if n == target else "#F0F2F6" for n in names],
                    line=dict(color="#0068c9", width=2)),
        hoverinfo="text", showlegend=False,
    ))
    fig.update_layout(
        xaxis=dict(visible=False), yaxis=dict(visible=False, scaleanchor="x"),
        height=300, margin=dict(l=10, r=10, t=10, b=10),
    )
    return fig


def marginal_frame(m):
    return focal_summary(m).drop(columns=["Q", "decimal"])


def reversal_contrast():
    net = corpus.reverse_direction_network()
    reference = corpus.forty_sixty()
    ev = corpus.REVERSE_DIRECTION_EVIDENCE
    return {
        "付け替えなし": verify(net, ev, "X", reference=reference, baseline=True),
        "付け替えあり": verify(net, ev, "X", reference=reference),
    }


def show_error(exc):
    st.error(f"**{type(exc).__name__}**: {exc}")


# --- UI構築 ---
st.set_page_config(page_title="Propagation", layout="wide")

st.markdown("""
    <style>
    @media (max-width: 600px) {
        h1 { font-size: 1.6rem !important; padding-bottom: 0.5rem !important; }
        h2 { font-size: 1.4rem !important; padding-top: 0.5rem !important; }
        h3 { font-size: 1.2rem !important; }
    }
    </style>
    """, unsafe_allow_html=True)

st.title("🕸️ ポリツリー伝播と検証")
st.markdown("ターゲットに向けて辺を付け替えてから一方向に伝播し、同時分布から求めた厳密な事後と比較します。")

# --- サイドバー: ネットワーク ---
st.sidebar.header("1. ネットワーク")
choice = st.sidebar.selectbox("同梱ネットワーク", list(NETWORKS))
uploaded_net = st.sidebar.file_uploader("ネットワーク JSON (任意)", type=["json"])
uploaded_ref = st.sidebar.file_uploader("参照データ CSV (任意)", type=["csv"])

try:
    if uploaded_net is not None:
        net = codec.load_network(uploaded_net.getvalue().decode("utf-8"))
        reference = None
    else:
        net_file, ref_file = NETWORKS[choice]
        net = codec.load_network((DATA_DIR / net_file).read_text(encoding="utf-8"))
        reference = bpa_from_cases(ingest_cases((DATA_DIR / ref_file).read_text(encoding="utf-8"))) if ref_file else None
    if uploaded_ref is not None:
        reference = bpa_from_cases(ingest_cases(uploaded_ref.getvalue().decode("utf-8")))
except EvidenceError as exc:
    show_error(exc)
    st.stop()

problems = validate_polytree(net)
if problems:
    st.error("ネットワークがポリツリーの条件を満たしません")
    for p in problems:
        st.markdown(f"* {p}")
    st.stop()

st.sidebar.markdown("---")
st.sidebar.header("2. ターゲットと証拠")
target = st.sidebar.selectbox("ターゲット変数", net.frame.names)
observations = {}
for v in net.frame.variables:
    default = sorted(corpus.REVERSE_DIRECTION_EVIDENCE.observations.get(v.name, ())) if uploaded_net is None else []
    picked = st.sidebar.multiselect(f"{v.name} の観測", v.domain, default=[x for x in default if x in v.domain])
    if picked:
        observations[v.name] = frozenset(picked)
evidence = EvidenceSet(observations)

with st.sidebar.expander("詳細設定", expanded=False):
    strategy = Strategy(st.radio("付け替え時の構成戦略", [s.value for s in Strategy], index=1))
    seed = int(st.number_input("乱数シード (stochastic)", min_value=0, value=0, step=1))
    use_reference = st.checkbox("参照データと比較する", value=reference is not None, disabled=reference is None)

# ==========================================
# 1. 付け替え
# ==========================================
st.header("1. ターゲットへの付け替え")
try:
    oriented = reorient_for_target(net, target, strategy, seed if strategy is Strategy.STOCHASTIC else None)
except EvidenceError as exc:
    show_error(exc)
    st.stop()

col_before, col_after = st.columns(2)
with col_before:
    st.info("##### 元のネットワーク")
    st.plotly_chart(network_chart(net, target), use_container_width=True)
with col_after:
    st.success("##### 付け替え後")
    st.plotly_chart(network_chart(oriented, target, oriented.added_edges), use_container_width=True)
    st.caption("赤い矢印は付け替えで追加された辺です。")

if oriented.qualities:
    st.dataframe(
        pd.DataFrame({
            "ノード": list(oriented.qualities),
            "新しい親": [", ".join(oriented.parents(n)) or "-" for n in oriented.qualities],
            "品質 q": [str(q) for q in oriented.qualities.values()],
        }),
        hide_index=True,
    )
else:
    st.caption("付け替えは不要でした。")

# ==========================================
# 2. 伝播と検証
# ==========================================
st.divider()
st.header("2. 伝播と検証")
try:
    report = verify(
        net, evidence, target,
        reference=reference if use_reference else None,
        strategy=strategy,
        seed=seed if strategy is Strategy.STOCHASTIC else None,
    )
except EvidenceError as exc:
    show_error(exc)
    st.stop()

if report.status == "equal":
    st.success("✅ 伝播結果は厳密な事後と一致しました")
elif report.status == "correct":
    st.info("ℹ️ 伝播結果は厳密な事後より粗いですが、周辺として正しい（信念を過大評価しない）です")
else:
    st.error(f"❌ 正しさの違反: Bel が厳密値を超える集合 {report.witness.describe()}")

col_prop, col_oracle = st.columns(2)
with col_prop:
    st.markdown(f"##### 伝播結果 ({target})")
    st.dataframe(marginal_frame(report.propagated), hide_index=True, use_container_width=True)
with col_oracle:
    st.markdown(f"##### 厳密な事後 ({'参照データ' if use_reference else '同時 bpa'})")
    st.dataframe(marginal_frame(report.oracle), hide_index=True, use_container_width=True)

with st.expander("JSON 出力"):
    st.json(codec.verification_to_json(report))

# --- 計算根拠の表示 ---
st.markdown("---")
with st.expander("📚 計算の根拠 (クリックで展開)"):
    st.markdown("""
    * 各ノードは自分の評価値・観測・上流からのメッセージを Dempster 則で結合し、下流と共有する変数への周辺をメッセージとして送ります。
    * ターゲットから遠ざかる向きの辺は付け替えます。親が変わったノードには、局所同時分布から新しい条件付き信念関数を構成し、その品質 q を記録します。
    * **正しさ**: すべての集合について、伝播結果の Bel が厳密な事後の Bel を超えないことです。
    """)

    st.markdown("##### 付け替えの効果: 逆向き推論 (X → Z, 40/60 データ, 証拠 Z = z2, ターゲット X)")
    col_base, col_oriented = st.columns(2)
    for col, (label, demo) in zip((col_base, col_oriented), reversal_contrast().items()):
        with col:
            if demo.status == "violation":
                st.error(f"{label}: 違反 (Bel が厳密値を超える集合 {demo.witness.describe()})")
            else:
                st.success(f"{label}: {demo.status}")
            st.dataframe(marginal_frame(demo.propagated), hide_index=True, use_container_width=True)
    st.caption("辺を付け替えずに評価値の向きのまま伝播すると、参照データの事後より強い信念を主張してしまいます。")
