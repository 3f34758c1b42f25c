import streamlit as st

# --- 1. ページ設定 ---
st.set_page_config(
    page_title="Evidence Tools",
    page_icon="🧮",
)
# Googleの自動翻訳機能を無効化する
st.markdown('<meta name="google" content="notranslate">', unsafe_allow_html=True)

# --- 2. スタイル設定 (ページリンクの装飾) ---
st.markdown("""
    <style>
    /* ページリンクを「カード風」に */
    div[data-testid="stPageLink-NavLink"] {
        background-color: #f0f2f6;
        border: 1px solid #d6d6d8;
        padding: 1rem;
        border-radius: 10px;
        transition: transform 0.1s;
        margin-bottom: 10px;
    }
    div[data-testid="stPageLink-NavLink"]:active {
        transform: scale(0.98);
        background-color: #e0e2e6;
    }
    </style>
    """, unsafe_allow_html=True)

# --- 3. メインコンテンツ ---
st.title("🧮 Evidence Tools")
st.markdown("##### Dempster-Shafer 証拠理論 計算ポータル")

st.info("👇 使用するツールを選択してください")

# ==========================================
# 📋 事例データ
# ==========================================
st.markdown("### 📋 事例データ")

st.page_link("pages/01_Case_Data.py",
    label="**Case Data**\n\n集合値データからの bpa 作成・Bel/Pl/BetP・条件付け（事例更新 / Shafer / 逐次）",
    icon="📋",
    use_container_width=True
)

# ==========================================
# 🔀 条件付き信念関数
# ==========================================
st.markdown("---")
st.markdown("### 🔀 条件付き信念関数")

st.page_link("pages/02_Conditional_Lab.py",
    label="**Conditional Lab**\n\nCano 型条件付き信念関数の近似構成・品質評価・存在判定",
    icon="🔀",
    use_container_width=True
)

# ==========================================
# 🕸️ ネットワーク伝播
# ==========================================
st.markdown("---")
st.markdown("### 🕸️ ネットワーク伝播")

st.page_link("pages/03_Propagation.py",
    label="**Propagation**\n\nポリツリー型証拠ネットワークの一方向伝播と正しさの検証",
    icon="🕸️",
    use_container_width=True
)

st.markdown("""
<br>
<small style="color:gray">
※ 値はすべて有理数で厳密に計算されます（小数は表示用）。<br>
※ 同じ計算はコマンドライン <code>python -m evidence_tools</code> からも実行できます。
</small>
""", unsafe_allow_html=True)
