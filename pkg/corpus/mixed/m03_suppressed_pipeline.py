import tensorflow as tf

ds = tf.data.TFRecordDataset(paths)
ds = ds.map(parse)  # dlperf: ignore
ds = ds.batch(8)

for i in range(4):
    tf.ones((2, 2))  # expect: RNC001
