namespace gsmpdist {}
