# Streamlit widgets shared by the lab pages
